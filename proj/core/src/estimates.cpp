#include "sigma2lab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace s2l {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double fd_sigma1(const GridField& u, int i, int j, int k) {
  const double h2 = u.h() * u.h();
  const double c = u.at(i, j, k);
  return (u.at(i + 1, j, k) + u.at(i - 1, j, k) + u.at(i, j + 1, k) +
          u.at(i, j - 1, k) + u.at(i, j, k + 1) + u.at(i, j, k - 1) - 6 * c) /
         h2;
}

std::string node_str(int i, int j, int k) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + "," +
         std::to_string(k) + ")";
}

double quad_form(const SymMat3& g, const Vec3& v) {
  double s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += g(i, j) * v[i] * v[j];
  return s;
}

}  // namespace

std::array<BoxRegion, 5> nested_regions(const GridField& u,
                                        double margin_cells) {
  const double w = (u.b - u.a) / 2;
  const double usable = w - margin_cells * u.h();
  if (usable <= 0)
    throw std::invalid_argument("nested_regions: grid too small");
  const double c = (u.a + u.b) / 2;
  std::array<BoxRegion, 5> out;
  for (int r = 0; r < 5; ++r)
    out[r] = BoxRegion{Vec3{c, c, c}, usable * (r + 1) / 5.0};
  return out;
}

NodeIndex argmax_sigma1(const GridField& u, const BoxRegion& region) {
  NodeIndex best{-1, -1, -1};
  double val = -std::numeric_limits<double>::infinity();
  for (int k = 1; k < u.n - 1; ++k)
    for (int j = 1; j < u.n - 1; ++j)
      for (int i = 1; i < u.n - 1; ++i) {
        if (!region.contains(u.point(i, j, k))) continue;
        const double s1 = fd_sigma1(u, i, j, k);
        if (s1 > val) {
          val = s1;
          best = NodeIndex{i, j, k};
        }
      }
  if (best.i < 0)
    throw std::domain_error("argmax_sigma1: region holds no interior node");
  return best;
}

TestQuantityParams measure_params(const GridField& u, const RhsModel& rhs,
                                  const std::array<BoxRegion, 5>& regions) {
  (void)rhs;
  TestQuantityParams p;
  double du_max = 0, u_max = 0, m1 = 0, m5 = 0;
  bool any = false;
  for (int k = 1; k < u.n - 1; ++k)
    for (int j = 1; j < u.n - 1; ++j)
      for (int i = 1; i < u.n - 1; ++i) {
        const Vec3 x = u.point(i, j, k);
        if (!regions[4].contains(x)) continue;
        Vec3 du;
        SymMat3 d2;
        jet2_at(u, i, j, k, du, d2);
        const double s1 = d2.trace();
        du_max = std::max(du_max, norm(du));
        u_max = std::max(u_max, std::fabs(u.at(i, j, k)));
        m5 = std::max(m5, s1);
        if (regions[0].contains(x)) m1 = std::max(m1, s1);
        any = true;
      }
  if (!any) throw std::domain_error("measure_params: empty outer region");
  p.du_max = du_max;
  p.u_max = u_max;
  p.m1 = m1;
  p.m5 = m5;
  p.beta = 1200.0 / p.c2 + 3.0;
  p.r_out = 2.0 * (u.b - u.a) / 2;
  return p;
}

double floor_term(double ratio, double floor20) {
  return std::log(std::log(std::max(ratio, floor20)));
}

FieldReport eval_P(const GridField& u, const RhsModel& rhs,
                   const TestQuantityParams& p, const BoxRegion& region) {
  (void)rhs;
  if (!(p.beta > 0) || !(p.m1 > 0) || !(p.r_out > 0))
    throw std::invalid_argument("eval_P: params not filled");
  const double den = 20.0 * p.du_max + 2.0 * p.u_max + 1.0;
  FieldReport rep;
  rep.values = u;
  rep.values.v.assign(u.v.size(), kNaN);
  rep.max = -std::numeric_limits<double>::infinity();
  for (int k = 1; k < u.n - 1; ++k)
    for (int j = 1; j < u.n - 1; ++j)
      for (int i = 1; i < u.n - 1; ++i) {
        const Vec3 x = u.point(i, j, k);
        if (!region.contains(x)) continue;
        Vec3 du;
        SymMat3 d2;
        jet2_at(u, i, j, k, du, d2);
        const Vec3 xi = x - region.center;
        const double rho = p.r_out * p.r_out - norm2(xi);
        if (rho <= 0)
          throw std::domain_error("eval_P: rho not positive at node " +
                                  node_str(i, j, k));
        const double t = dot(xi, du) - u.at(i, j, k);
        if (t >= den)
          throw std::domain_error("eval_P: g argument out of range at node " +
                                  node_str(i, j, k));
        const double g = -std::log(1.0 - t / den) / (2.0 * p.beta);
        const double val =
            2.0 * std::log(rho) + g + floor_term(d2.trace() / p.m1, p.floor20);
        rep.values.v[u.idx(i, j, k)] = val;
        ++rep.evaluated;
        if (val > rep.max) {
          rep.max = val;
          rep.argmax = NodeIndex{i, j, k};
        }
      }
  if (rep.evaluated == 0)
    throw std::domain_error("eval_P: region holds no interior node");
  return rep;
}

FieldReport eval_phi(const GridField& u, const RhsModel& rhs,
                     const TestQuantityParams& p, const BoxRegion& region) {
  if (!(p.m5 > 1) || !(p.r_out > 0))
    throw std::invalid_argument("eval_phi: params not filled (need m5 > 1)");
  const double den = 2.0 * p.du_max * p.du_max + 1.0;
  const double lm5 = std::sqrt(std::log(p.m5));
  FieldReport rep;
  rep.values = u;
  rep.values.v.assign(u.v.size(), kNaN);
  rep.max = -std::numeric_limits<double>::infinity();
  for (int k = 1; k < u.n - 1; ++k)
    for (int j = 1; j < u.n - 1; ++j)
      for (int i = 1; i < u.n - 1; ++i) {
        const Vec3 x = u.point(i, j, k);
        if (!region.contains(x)) continue;
        Vec3 du;
        SymMat3 d2;
        jet2_at(u, i, j, k, du, d2);
        const Vec3 xi = x - region.center;
        const double rho = p.r_out * p.r_out - norm2(xi);
        if (rho <= 0)
          throw std::domain_error("eval_phi: rho not positive at node " +
                                  node_str(i, j, k));
        const double t = norm2(du) / 2.0;
        if (t >= den)
          throw std::domain_error(
              "eval_phi: h argument out of range at node " + node_str(i, j, k));
        const double hterm = -0.5 * std::log(1.0 - t / den);
        const RhsEval e = rhs.eval(x, u.at(i, j, k), du);
        const Sigmas s = sigma_all(d2);
        const double w = e.value * s.s1 - s.s3;
        const double inner = w > 1.0 ? w * lm5 / (p.m5 * std::log(w)) : 0.0;
        const double val =
            4.0 * std::log(rho) + hterm + floor_term(inner, p.floor20);
        rep.values.v[u.idx(i, j, k)] = val;
        ++rep.evaluated;
        if (val > rep.max) {
          rep.max = val;
          rep.argmax = NodeIndex{i, j, k};
        }
      }
  if (rep.evaluated == 0)
    throw std::domain_error("eval_phi: region holds no interior node");
  return rep;
}

double doubling_ratio(const GridField& u, const BoxRegion& inner,
                      const BoxRegion& outer) {
  for (int d = 0; d < 3; ++d)
    if (std::fabs(inner.center[d] - outer.center[d]) + inner.half >
        outer.half + 1e-12)
      throw std::invalid_argument("doubling_ratio: inner not inside outer");
  double si = -std::numeric_limits<double>::infinity(), so = si;
  for (int k = 1; k < u.n - 1; ++k)
    for (int j = 1; j < u.n - 1; ++j)
      for (int i = 1; i < u.n - 1; ++i) {
        const Vec3 x = u.point(i, j, k);
        if (!outer.contains(x)) continue;
        const double s1 = fd_sigma1(u, i, j, k);
        so = std::max(so, s1);
        if (inner.contains(x)) si = std::max(si, s1);
      }
  if (!std::isfinite(si) || !std::isfinite(so))
    throw std::domain_error("doubling_ratio: empty region");
  if (si <= 0) throw std::domain_error("doubling_ratio: sigma1 not positive");
  return so / si;
}

V1Report v1_check(const GridField& u, const RhsModel& rhs,
                  const BoxRegion& check_region, const BoxRegion& outer,
                  double floor) {
  V1Report rep;
  rep.margin = u;
  rep.margin.v.assign(u.v.size(), kNaN);
  double m5 = -std::numeric_limits<double>::infinity();
  for (int k = 1; k < u.n - 1; ++k)
    for (int j = 1; j < u.n - 1; ++j)
      for (int i = 1; i < u.n - 1; ++i)
        if (outer.contains(u.point(i, j, k)))
          m5 = std::max(m5, fd_sigma1(u, i, j, k));
  if (!std::isfinite(m5) || m5 <= 1)
    throw std::domain_error("v1_check: outer sigma1 sup must exceed 1");
  rep.m5 = m5;
  rep.m5_eligible = m5 >= std::exp(2.0);
  const double coef = m5 / std::sqrt(std::log(m5));
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (int k = 1; k < u.n - 1; ++k)
    for (int j = 1; j < u.n - 1; ++j)
      for (int i = 1; i < u.n - 1; ++i) {
        const Vec3 x = u.point(i, j, k);
        if (!check_region.contains(x)) continue;
        Vec3 du;
        SymMat3 d2;
        jet2_at(u, i, j, k, du, d2);
        const RhsEval e = rhs.eval(x, u.at(i, j, k), du);
        const Sigmas s = sigma_all(d2);
        const double w = e.value * s.s1 - s.s3;
        if (!(w >= floor)) {
          ++rep.skipped;
          continue;
        }
        const double margin = coef * std::log(w) - w;
        rep.margin.v[u.idx(i, j, k)] = margin;
        ++rep.checked;
        if (margin < 0) ++rep.violations;
        rep.min_margin = std::min(rep.min_margin, margin);
      }
  if (rep.checked == 0) rep.min_margin = 0;
  return rep;
}

ChainAudit integral_chain_audit(const GridField& u, const RhsModel& rhs,
                                NodeIndex x0) {
  const int n = u.n;
  const double h = u.h(), vol = h * h * h;
  if (x0.i < 1 || x0.j < 1 || x0.k < 1 || x0.i > n - 2 || x0.j > n - 2 ||
      x0.k > n - 2)
    throw std::invalid_argument("integral_chain_audit: x0 not interior");
  const Vec3 c = u.point(x0.i, x0.j, x0.k);
  double dmin = std::numeric_limits<double>::infinity();
  for (int d = 0; d < 3; ++d)
    dmin = std::min({dmin, c[d] - u.a, u.b - c[d]});
  const double w1 = (dmin - 3 * h) / 5.0;
  if (w1 < h)
    throw std::domain_error(
        "integral_chain_audit: x0 too close to the boundary for nested "
        "regions");
  const double w2 = 2 * w1, w3 = 3 * w1;

  // nodal b = log sigma1 (NaN where the FD trace is not positive)
  std::vector<double> b(u.v.size(), kNaN);
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        const double s1 = fd_sigma1(u, i, j, k);
        if (s1 > 0) b[u.idx(i, j, k)] = std::log(s1);
      }

  // product quintic cutoff: 1 for |xi| <= w2 per axis, 0 at w3
  auto step = [&](double t) {  // descends from 1 to 0 over [0,1]
    if (t <= 0) return 1.0;
    if (t >= 1) return 0.0;
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  };
  auto dstep = [&](double t) {
    if (t <= 0 || t >= 1) return 0.0;
    const double q = t * (1.0 - t);
    return -30.0 * q * q;
  };

  ChainAudit a;
  a.base_half = w1;
  a.c_min = std::numeric_limits<double>::infinity();
  a.m1 = -std::numeric_limits<double>::infinity();
  double fp_int = 0, d_phi2 = 0, d_cross = 0, e_b2 = 0, s1_b2 = 0;

  for (int k = 2; k < n - 2; ++k)
    for (int j = 2; j < n - 2; ++j)
      for (int i = 2; i < n - 2; ++i) {
        const Vec3 x = u.point(i, j, k);
        const Vec3 xi = x - c;
        const double linf =
            std::max({std::fabs(xi[0]), std::fabs(xi[1]), std::fabs(xi[2])});
        if (linf > w3 + 1e-12) continue;

        Vec3 du;
        SymMat3 d2;
        jet2_at(u, i, j, k, du, d2);
        const RhsEval e = rhs.eval(x, u.at(i, j, k), du);
        const Sigmas s = sigma_all(d2);
        if (!(s.s1 > 0))
          throw std::domain_error(
              "integral_chain_audit: sigma1 not positive at node " +
              node_str(i, j, k));

        const double bc = b[u.idx(i, j, k)];
        const double bxp = b[u.idx(i + 1, j, k)], bxm = b[u.idx(i - 1, j, k)];
        const double byp = b[u.idx(i, j + 1, k)], bym = b[u.idx(i, j - 1, k)];
        const double bzp = b[u.idx(i, j, k + 1)], bzm = b[u.idx(i, j, k - 1)];
        if (std::isnan(bc) || std::isnan(bxp) || std::isnan(bxm) ||
            std::isnan(byp) || std::isnan(bym) || std::isnan(bzp) ||
            std::isnan(bzm))
          throw std::domain_error(
              "integral_chain_audit: log sigma1 undefined near node " +
              node_str(i, j, k));
        const Vec3 gb{(bxp - bxm) / (2 * h), (byp - bym) / (2 * h),
                      (bzp - bzm) / (2 * h)};
        SymMat3 hb;
        hb.set(0, 0, (bxp - 2 * bc + bxm) / (h * h));
        hb.set(1, 1, (byp - 2 * bc + bym) / (h * h));
        hb.set(2, 2, (bzp - 2 * bc + bzm) / (h * h));
        hb.set(0, 1,
               (b[u.idx(i + 1, j + 1, k)] - b[u.idx(i + 1, j - 1, k)] -
                b[u.idx(i - 1, j + 1, k)] + b[u.idx(i - 1, j - 1, k)]) /
                   (4 * h * h));
        hb.set(0, 2,
               (b[u.idx(i + 1, j, k + 1)] - b[u.idx(i + 1, j, k - 1)] -
                b[u.idx(i - 1, j, k + 1)] + b[u.idx(i - 1, j, k - 1)]) /
                   (4 * h * h));
        hb.set(1, 2,
               (b[u.idx(i, j + 1, k + 1)] - b[u.idx(i, j + 1, k - 1)] -
                b[u.idx(i, j - 1, k + 1)] + b[u.idx(i, j - 1, k - 1)]) /
                   (4 * h * h));

        const SymMat3 sg = sigma2_gradient(d2);
        const double sbb = quad_form(sg, gb);

        // cutoff value and analytic gradient
        double psi[3], dpsi[3];
        for (int d = 0; d < 3; ++d) {
          const double adist = std::fabs(xi[d]);
          const double t = (adist - w2) / (w3 - w2);
          psi[d] = step(t);
          dpsi[d] = dstep(t) / (w3 - w2) * (xi[d] >= 0 ? 1.0 : -1.0);
        }
        const double phi = psi[0] * psi[1] * psi[2];
        const Vec3 gphi{dpsi[0] * psi[1] * psi[2], psi[0] * dpsi[1] * psi[2],
                        psi[0] * psi[1] * dpsi[2]};

        ++a.nodes;
        if (linf <= w1 + 1e-12) {
          a.t_meanvalue += s.s1 * (e.value * s.s1 - s.s3) * vol;
          a.t_entropy += s.s1 * std::log(s.s1) * vol;
          a.m1 = std::max(a.m1, s.s1);
        }
        if (linf <= w2 + 1e-12) {
          a.t_gradb += norm(gb) * vol;
          e_b2 += sbb * vol;
          s1_b2 += s.s1 * vol;
        }
        a.t_energy += phi * phi * sbb * vol;
        a.a_grad += quad_form(sg, gphi) * vol;
        a.a_sigma1 += phi * phi * s.s1 * vol;
        fp_int += phi * phi * dot(e.fp, gb) * vol;

        const double sg_bij = inner(sg, hb);
        d_phi2 += phi * phi * sg_bij * vol;
        double cross = 0;
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) cross += sg(p, q) * gb[p] * gphi[q];
        d_cross += phi * cross * vol;

        const double lmax = eigen_sorted(d2).lambda[0];
        a.c_min = std::min(a.c_min, s.s1 * (s.s1 - lmax));
        const double resid = sg_bij - sbb / 100.0 - dot(e.fp, gb);
        if (resid < 0) a.c_star = std::max(a.c_star, -resid / s.s1);
      }

  if (a.nodes == 0)
    throw std::domain_error("integral_chain_audit: empty audit region");
  a.a_fp = std::fabs(fp_int);
  a.disc = std::fabs(d_phi2 + 2.0 * d_cross);
  a.implied_bound =
      200.0 * (200.0 * a.a_grad + a.c_star * a.a_sigma1 + a.a_fp + a.disc);
  a.absorption_margin = a.implied_bound - a.t_energy;
  a.c_a = (a.t_energy > 0 && s1_b2 > 0)
              ? a.t_gradb * a.t_gradb / (a.t_energy * s1_b2)
              : 0.0;
  a.c_b = a.t_entropy / (1.0 + a.t_gradb);
  a.holder_margin = (a.c_min > 0)
                        ? a.t_energy * s1_b2 / a.c_min - a.t_gradb * a.t_gradb
                        : 0.0;
  const double dw = w3 - w2;
  a.cutoff_grad_bound = 1.875 * std::sqrt(3.0) / dw +
                        3.0 * 5.7735026918962584 / (dw * dw) +
                        6.0 * 1.875 * 1.875 / (dw * dw);
  return a;
}

}  // namespace s2l
