#include "sigma2lab/graphgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace s2l {

double graph_radius(const Jet3& jet, const RhsEval& rhs, const Vec3& y0,
                    const Vec3& du0) {
  if (rhs.value <= 0)
    throw std::domain_error("graph_radius: rhs must be positive");
  const Vec3 dx = jet.x - y0;
  const Vec3 dp = jet.du - du0;
  return std::sqrt(rhs.value * norm2(dx) + norm2(dp));
}

GraphGauge graph_gauge(const Jet3& jet, const RhsEval& rhs, const Vec3& y0,
                       const Vec3& du0) {
  GraphGauge g;
  g.r = graph_radius(jet, rhs, y0, du0);
  if (g.r <= 0)
    throw std::domain_error("graph_gauge: gradient undefined at the center");
  const Vec3 dx = jet.x - y0;
  const Vec3 dp = jet.du - du0;
  const Vec3 fi = total_gradient(rhs, jet);
  const double dx2 = norm2(dx);
  for (int i = 0; i < 3; ++i) {
    double num = fi[i] * dx2 + 2.0 * rhs.value * dx[i];
    for (int k = 0; k < 3; ++k) num += 2.0 * dp[k] * jet.d2u(k, i);
    g.grad[i] = num / (2.0 * g.r);
  }
  return g;
}

double weighted_density(const Jet3& jet, const RhsEval& rhs) {
  if (rhs.value <= 0)
    throw std::domain_error("weighted_density: rhs must be positive");
  if (!in_gamma2(jet.d2u).inside)
    throw std::domain_error("weighted_density: Hessian outside Gamma_2");
  const Sigmas s = sigma_all(jet.d2u);
  return s.s1 * (rhs.value * s.s1 - s.s3);
}

double cla_ratio(const Jet3& jet, const RhsEval& rhs, const Vec3& y0,
                 const Vec3& du0) {
  const GraphGauge g = graph_gauge(jet, rhs, y0, du0);
  const Sigmas s = sigma_all(jet.d2u);
  const double wt = rhs.value * s.s1 - s.s3;
  if (wt <= 0) throw std::domain_error("cla_ratio: weight is not positive");
  const SymMat3 grad = sigma2_gradient(jet.d2u);
  double val = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) val += grad(i, j) * g.grad[i] * g.grad[j];
  return val / wt;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GaugeField {
  int n = 0;
  double h = 0;
  const GridField* field = nullptr;
  const RhsModel* model = nullptr;
  Vec3 y0{};
  Vec3 du0{};
  bool euclidean = false;
  std::vector<double> q2;    // squared gauge at interior nodes, NaN elsewhere
  std::vector<double> dens;  // sigma1 (f sigma1 - sigma3), NaN where undefined
  std::vector<double> du[3];
  double slack = 0;  // bound on the interior excursion of q2 within a cell
  std::size_t id(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(n) * (std::size_t(j) + std::size_t(n) * k);
  }
};

GaugeField build_gauge(const GridField& u, const RhsModel& m, NodeIndex c,
                       bool euclidean) {
  const int n = u.n;
  if (c.i < 1 || c.j < 1 || c.k < 1 || c.i > n - 2 || c.j > n - 2 ||
      c.k > n - 2)
    throw std::invalid_argument("ball center must be an interior node");
  GaugeField g;
  g.n = n;
  g.h = u.h();
  g.field = &u;
  g.model = &m;
  g.y0 = u.point(c.i, c.j, c.k);
  g.euclidean = euclidean;
  SymMat3 d20;
  jet2_at(u, c.i, c.j, c.k, g.du0, d20);

  g.q2.assign(u.v.size(), kNaN);
  g.dens.assign(u.v.size(), kNaN);
  for (auto& a : g.du) a.assign(u.v.size(), kNaN);
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        const Vec3 x = u.point(i, j, k);
        Vec3 du;
        SymMat3 d2;
        jet2_at(u, i, j, k, du, d2);
        const std::size_t id = g.id(i, j, k);
        for (int a = 0; a < 3; ++a) g.du[a][id] = du[a];
        const RhsEval e = m.eval(x, u.at(i, j, k), du);
        if (e.value <= 0 || !in_gamma2(d2).inside) continue;
        const Sigmas s = sigma_all(d2);
        const double wt = e.value * s.s1 - s.s3;
        if (wt <= 0) continue;
        g.dens[id] = s.s1 * wt;
        const Vec3 dx = x - g.y0;
        g.q2[id] =
            euclidean ? norm2(dx) : e.value * norm2(dx) + norm2(du - g.du0);
      }

  // Safety margin for corner-based cell classification: the gauge inside a
  // cell can leave the corner range by at most ~(3/8) h^2 sup|d_ii q2|;
  // estimate the supremum from nodal second differences and pad it.
  double k2 = 0;
  for (int k = 2; k < n - 2; ++k)
    for (int j = 2; j < n - 2; ++j)
      for (int i = 2; i < n - 2; ++i) {
        const double q0 = g.q2[g.id(i, j, k)];
        if (std::isnan(q0)) continue;
        const double dd[3] = {
            g.q2[g.id(i + 1, j, k)] + g.q2[g.id(i - 1, j, k)] - 2 * q0,
            g.q2[g.id(i, j + 1, k)] + g.q2[g.id(i, j - 1, k)] - 2 * q0,
            g.q2[g.id(i, j, k + 1)] + g.q2[g.id(i, j, k - 1)] - 2 * q0};
        for (double d : dd)
          if (!std::isnan(d)) k2 = std::max(k2, std::fabs(d));
      }
  g.slack = k2;
  return g;
}

bool shell_node(int n, int i, int j, int k) {
  return i <= 1 || j <= 1 || k <= 1 || i >= n - 2 || j >= n - 2 || k >= n - 2;
}

// Inside-fraction of a vertical segment whose squared gauge runs linearly
// from qb to qt.
double column_fraction(double qb, double qt, double level) {
  const bool ib = qb <= level, it = qt <= level;
  if (ib && it) return 1.0;
  if (!ib && !it) return 0.0;
  const double t = (level - qb) / (qt - qb);
  return ib ? t : 1.0 - t;
}

double sublevel_mass(const GaugeField& g, double delta,
                     const BallQuadParams& qp) {
  if (!(delta > 0)) throw std::invalid_argument("radius must be positive");
  const int n = g.n;
  const double cell = g.h * g.h * g.h;
  const double level = delta * delta;
  double mass = 0;

  if (qp.mode == BallQuadParams::Mode::Sharp ||
      qp.mode == BallQuadParams::Mode::Smoothed) {
    const bool sharp = qp.mode == BallQuadParams::Mode::Sharp;
    const double width = std::max(qp.smooth_cells, 1e-12) * g.h;
    for (int k = 1; k < n - 1; ++k)
      for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) {
          const std::size_t id = g.id(i, j, k);
          const double q = g.q2[id];
          if (std::isnan(q)) continue;
          double w;
          if (sharp) {
            if (!(q <= level)) continue;
            w = 1.0;
          } else {
            const double t = (delta - std::sqrt(q)) / width + 0.5;
            if (t <= 0) continue;
            w = t >= 1 ? 1.0 : t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
          }
          if (shell_node(n, i, j, k))
            throw std::domain_error(
                "ball_mass: ball reaches the boundary layer of the grid");
          mass += w * g.dens[id] * cell;
        }
    return mass;
  }

  // Cell-fraction quadrature. Cells whose corner gauge range clears the
  // level by the interior-excursion bound are taken whole or skipped;
  // straddling cells evaluate the gauge at subcolumns^2 midpoint columns
  // with subcolumns+1 knots each. The Euclidean factor |x-y0|^2 is exact at
  // every knot; only u and Du are interpolated, so quadratic solutions
  // (linear gradients) incur no interpolation error at all.
  const int sc = std::max(1, qp.subcolumns);
  const auto& uf = *g.field;
  double cq[8], cd[8], cu[8], cdu[3][8];
  for (int k = 1; k < n - 2; ++k)
    for (int j = 1; j < n - 2; ++j)
      for (int i = 1; i < n - 2; ++i) {
        double qmin = std::numeric_limits<double>::infinity();
        double qmax = -qmin;
        bool anynan = false;
        for (int dz = 0; dz < 2; ++dz)
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
              const std::size_t id = g.id(i + dx, j + dy, k + dz);
              const int t = dx + 2 * dy + 4 * dz;
              cq[t] = g.q2[id];
              cd[t] = g.dens[id];
              cu[t] = uf.v[id];
              for (int a = 0; a < 3; ++a) cdu[a][t] = g.du[a][id];
              if (std::isnan(cq[t])) {
                anynan = true;
              } else {
                qmin = std::min(qmin, cq[t]);
                qmax = std::max(qmax, cq[t]);
              }
            }
        if (!(qmin <= level + g.slack)) continue;
        if (i == 1 || j == 1 || k == 1 || i + 1 == n - 2 || j + 1 == n - 2 ||
            k + 1 == n - 2)
          throw std::domain_error(
              "ball_mass: ball reaches the boundary layer of the grid");
        if (anynan)
          throw std::domain_error(
              "ball_mass: density undefined inside the ball");
        double frac;
        if (qmax <= level - g.slack) {
          frac = 1.0;
        } else {
          const Vec3 origin = uf.point(i, j, k);
          auto qknot = [&](double xa, double yb, double zc) {
            const Vec3 x{origin[0] + xa * g.h, origin[1] + yb * g.h,
                         origin[2] + zc * g.h};
            const Vec3 dxv = x - g.y0;
            if (g.euclidean) return norm2(dxv);
            const double w[8] = {(1 - xa) * (1 - yb) * (1 - zc),
                                 xa * (1 - yb) * (1 - zc),
                                 (1 - xa) * yb * (1 - zc),
                                 xa * yb * (1 - zc),
                                 (1 - xa) * (1 - yb) * zc,
                                 xa * (1 - yb) * zc,
                                 (1 - xa) * yb * zc,
                                 xa * yb * zc};
            double uu = 0;
            Vec3 dd{};
            for (int t = 0; t < 8; ++t) {
              uu += w[t] * cu[t];
              for (int a = 0; a < 3; ++a) dd[a] += w[t] * cdu[a][t];
            }
            const RhsEval e = g.model->eval(x, uu, dd);
            if (e.value <= 0)
              throw std::domain_error(
                  "ball_mass: rhs not positive inside the ball");
            return e.value * norm2(dxv) + norm2(dd - g.du0);
          };
          double acc = 0;
          for (int a = 0; a < sc; ++a)
            for (int b = 0; b < sc; ++b) {
              const double xa = (a + 0.5) / sc, yb = (b + 0.5) / sc;
              double qlo = qknot(xa, yb, 0.0);
              for (int m = 1; m <= sc; ++m) {
                const double qhi = qknot(xa, yb, double(m) / sc);
                acc += column_fraction(qlo, qhi, level) / sc;
                qlo = qhi;
              }
            }
          frac = acc / (sc * sc);
        }
        if (frac <= 0) continue;
        double dsum = 0;
        for (double x : cd) dsum += x;
        mass += frac * (dsum / 8.0) * cell;
      }
  return mass;
}

}  // namespace

double ball_mass(const GridField& u, const RhsModel& rhs, NodeIndex y0,
                 double delta, const BallQuadParams& q) {
  return sublevel_mass(build_gauge(u, rhs, y0, false), delta, q);
}

MassProfile monotonicity_profile(const GridField& u, const RhsModel& rhs,
                                 NodeIndex y0,
                                 const std::vector<double>& radii,
                                 const BallQuadParams& q) {
  if (radii.size() < 2)
    throw std::invalid_argument("monotonicity_profile: need at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw std::invalid_argument(
          "monotonicity_profile: radii must be positive and increasing");
  const GaugeField g = build_gauge(u, rhs, y0, false);
  MassProfile p;
  p.radii = radii;
  for (double delta : radii) {
    const double m = sublevel_mass(g, delta, q);
    p.masses.push_back(m);
    p.ratios.push_back(m / (delta * delta * delta));
  }
  p.c_emp = 0;
  for (std::size_t i = 0; i < p.ratios.size(); ++i)
    for (std::size_t j = i; j < p.ratios.size(); ++j) {
      if (!(p.ratios[j] > 0))
        throw std::domain_error("monotonicity_profile: empty ball");
      p.c_emp = std::max(p.c_emp, p.ratios[i] / p.ratios[j]);
    }
  return p;
}

double mean_value_ratio(const GridField& u, const RhsModel& rhs, NodeIndex y0,
                        double radius, const BallQuadParams& q) {
  const GaugeField g = build_gauge(u, rhs, y0, true);
  const double m = sublevel_mass(g, radius, q);
  if (!(m > 0)) throw std::domain_error("mean_value_ratio: empty ball");
  Vec3 du0;
  SymMat3 d20;
  jet2_at(u, y0.i, y0.j, y0.k, du0, d20);
  const double r3 = radius * radius * radius;
  return d20.trace() / (m / r3);
}

LambdaChainReport lambda_chain(const Vec3& lambda) {
  const double l1 = lambda[0], l2 = lambda[1], l3 = lambda[2];
  if (!(l1 >= l2 && l2 >= l3))
    throw std::invalid_argument("lambda_chain: eigenvalues must be ordered");
  const Sigmas s = sigma_from_lambda(lambda);
  if (s.s1 <= 0 || s.s2 <= 0)
    throw std::domain_error("lambda_chain: outside Gamma_2");
  const double f = s.s2;
  const double wt = f * s.s1 - s.s3;
  LambdaChainReport r;
  r.m_lower = wt - (f * l1 + l1 * l3 * l3);
  r.identity = l1 * l2 - (f - l1 * l3 - l2 * l3);
  r.m_upper = (1.0 / l1 + 1.0 / std::sqrt(f)) * wt - l1 * l2;
  r.m_neg = l3 < 0 ? wt - 2.0 * std::sqrt(f) * l1 * (-l3) : 0.0;
  r.ratio_lower = l3 < 0 ? (-l2 * l3) / wt : 0.0;
  r.ratio_upper = l1 * l2 / wt;
  return r;
}

}  // namespace s2l
