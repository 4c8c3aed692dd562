#include "sigma2lab/solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "sigma2lab/parallel.hpp"

namespace s2l {

GridField admissible_init(double a, double b, int n,
                          const std::function<double(const Vec3&)>& g,
                          double A) {
  GridField u = sample_field(
      [A](const Vec3& x) { return 0.5 * A * norm2(x); }, a, b, n);
  apply_boundary(u, g);
  return u;
}

namespace {

struct NodeEval {
  double residual;
  SymMat3 grad;  // sigma2^{ij} at the node
  Vec3 fp;
  double fu;
};

// interior nodes only, same x-fastest ordering as the field
int interior_count(int n) { return (n - 2) * (n - 2) * (n - 2); }

int interior_index(const GridField& u, int i, int j, int k) {
  int m = u.n - 2;
  return (i - 1) + m * ((j - 1) + m * (k - 1));
}

double eval_residual(const GridField& u, const RhsModel& rhs, int i, int j,
                     int k, NodeEval* ev) {
  Vec3 du;
  SymMat3 d2u;
  jet2_at(u, i, j, k, du, d2u);
  Vec3 x = u.point(i, j, k);
  RhsEval e = rhs.eval(x, u.at(i, j, k), du);
  double r = sigma_all(d2u).s2 - e.value;
  if (ev) {
    ev->residual = r;
    ev->grad = sigma2_gradient(d2u);
    ev->fp = e.fp;
    ev->fu = e.fu;
  }
  return r;
}

}  // namespace

double residual_norm(const GridField& u, const RhsModel& rhs) {
  int n = u.n;
  double worst = 0;
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i)
        worst = std::max(worst,
                         std::abs(eval_residual(u, rhs, i, j, k, nullptr)));
  return worst;
}

double cone_margin(const GridField& u, double tau) {
  int n = u.n;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        Vec3 du;
        SymMat3 d2u;
        jet2_at(u, i, j, k, du, d2u);
        worst = std::min(worst, in_gamma2(d2u, tau).margin);
      }
  return worst;
}

namespace {

struct NewtonSystem {
  Eigen::SparseMatrix<double> mat;
  Eigen::VectorXd rhs;
  double residual_norm = 0;
  int mmatrix_violations = 0;
};

// Assembles A v = r with A = -(sigma2^{ij} d_ij - f_p.grad - f_u), so the
// diagonal is positive and the M-matrix sign check applies to A directly.
NewtonSystem assemble(const GridField& u, const RhsModel& rhs) {
  int n = u.n, m = n - 2;
  double h = u.h(), h2 = h * h;
  NewtonSystem sys;
  int rows = interior_count(n);
  sys.rhs.resize(rows);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(rows) * 19);
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        NodeEval ev;
        eval_residual(u, rhs, i, j, k, &ev);
        int row = interior_index(u, i, j, k);
        sys.rhs[row] = ev.residual;
        sys.residual_norm = std::max(sys.residual_norm,
                                     std::abs(ev.residual));
        bool bad_row = false;
        auto add = [&](int ii, int jj, int kk, double w) {
          if (w == 0.0) return;
          // zero-boundary correction: skip boundary columns
          if (ii == 0 || jj == 0 || kk == 0 || ii == n - 1 || jj == n - 1 ||
              kk == n - 1)
            return;
          int col = (ii - 1) + m * ((jj - 1) + m * (kk - 1));
          if (col != row && w > 0) bad_row = true;
          trip.emplace_back(row, col, w);
        };
        double diag = ev.fu;
        for (int a = 0; a < 3; ++a) diag += 2 * ev.grad(a, a) / h2;
        add(i, j, k, diag);
        for (int a = 0; a < 3; ++a) {
          int di = a == 0, dj = a == 1, dk = a == 2;
          double axis = -ev.grad(a, a) / h2;
          add(i + di, j + dj, k + dk, axis + ev.fp[a] / (2 * h));
          add(i - di, j - dj, k - dk, axis - ev.fp[a] / (2 * h));
        }
        for (int a = 0; a < 3; ++a)
          for (int b = a + 1; b < 3; ++b) {
            double w = -2 * ev.grad(a, b) / (4 * h2);
            int d[3] = {0, 0, 0};
            d[a] = 1;
            d[b] = 1;
            add(i + d[0], j + d[1], k + d[2], w);
            add(i - d[0], j - d[1], k - d[2], w);
            d[b] = -1;
            add(i + d[0], j + d[1], k + d[2], -w);
            add(i - d[0], j - d[1], k - d[2], -w);
          }
        if (bad_row) ++sys.mmatrix_violations;
      }
  sys.mat.resize(rows, rows);
  sys.mat.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

// Replaces the boundary layer of u by target and adds the discrete harmonic
// extension of the boundary increment to the interior. A raw boundary swap
// would kick the near-boundary finite-difference Hessian out of the cone by
// O(increment/h^2); the harmonic lift changes D2_h u by O(increment) instead.
void harmonic_lift(GridField& u,
                   const std::function<double(const Vec3&)>& target) {
  int n = u.n, m = n - 2;
  double h2 = u.h() * u.h();
  int rows = interior_count(n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(rows) * 7);
  auto delta = [&](int i, int j, int k) {
    return target(u.point(i, j, k)) - u.at(i, j, k);
  };
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        int row = interior_index(u, i, j, k);
        trip.emplace_back(row, row, 6.0 / h2);
        int nb[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k},
                        {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
        for (auto& d : nb) {
          if (d[0] == 0 || d[1] == 0 || d[2] == 0 || d[0] == n - 1 ||
              d[1] == n - 1 || d[2] == n - 1) {
            rhs[row] += delta(d[0], d[1], d[2]) / h2;
          } else {
            trip.emplace_back(
                row, (d[0] - 1) + m * ((d[1] - 1) + m * (d[2] - 1)),
                -1.0 / h2);
          }
        }
      }
  Eigen::SparseMatrix<double> lap(rows, rows);
  lap.setFromTriplets(trip.begin(), trip.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper>
      cg(lap);
  cg.setTolerance(1e-12);
  Eigen::VectorXd w = cg.solve(rhs);
  if (cg.info() != Eigen::Success)
    throw LinearSolveFailure("harmonic_lift: CG did not converge");
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i)
        u.at(i, j, k) += w[interior_index(u, i, j, k)];
  apply_boundary(u, target);
}

}  // namespace

std::pair<GridField, SolveStats> solve_dirichlet(
    const RhsModel& rhs, const std::function<double(const Vec3&)>& g,
    double a, double b, int n, const SolveParams& params) {
  if (n < 9) throw std::invalid_argument("solve_dirichlet: n < 9");
  SolveStats stats;
  auto quad = [&](const Vec3& x) { return 0.5 * params.init_a * norm2(x); };
  GridField u = admissible_init(a, b, n, quad, params.init_a);

  int stages = std::max(1, params.homotopy_steps);
  for (int stage = 1; stage <= stages; ++stage) {
    double t = double(stage) / stages;
    harmonic_lift(u, [&](const Vec3& x) {
      return (1 - t) * quad(x) + t * g(x);
    });
    {
      double m0 = cone_margin(u, params.tau);
      if (!(m0 > 0)) {
        // find the witness node
        for (int kk = 1; kk < n - 1; ++kk)
          for (int jj = 1; jj < n - 1; ++jj)
            for (int ii = 1; ii < n - 1; ++ii) {
              Vec3 du;
              SymMat3 d2u;
              jet2_at(u, ii, jj, kk, du, d2u);
              if (!in_gamma2(d2u, params.tau).inside)
                throw ConeExit(
                    "solve_dirichlet: lifted iterate outside the cone",
                    u.point(ii, jj, kk));
            }
      }
    }
    double res = residual_norm(u, rhs);
    bool done = res <= params.tol;
    int it = 0;
    while (!done) {
      if (++it > params.max_iter)
        throw NonConvergence("solve_dirichlet: max_iter exceeded", stats);
      NewtonSystem sys = assemble(u, rhs);
      stats.mmatrix_violations = sys.mmatrix_violations;
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double>,
                      Eigen::DiagonalPreconditioner<double>>
          lin(sys.mat);
      lin.setTolerance(params.lin_tol);
      Eigen::VectorXd v = lin.solve(sys.rhs);
      if (lin.info() != Eigen::Success)
        throw LinearSolveFailure(
            "solve_dirichlet: BiCGSTAB stagnated at relative error " +
            std::to_string(lin.error()));
      GridField trial = u;
      double accepted = 0, trial_res = 0, trial_margin = 0;
      bool cone_ok_somewhere = false;
      for (int p = 0; p <= 10; ++p) {
        double s = std::pow(0.5, p);
        for (int kk = 1; kk < n - 1; ++kk)
          for (int jj = 1; jj < n - 1; ++jj)
            for (int ii = 1; ii < n - 1; ++ii)
              trial.at(ii, jj, kk) =
                  u.at(ii, jj, kk) + s * v[interior_index(u, ii, jj, kk)];
        double margin = cone_margin(trial, params.tau);
        if (!(margin > 0)) continue;
        cone_ok_somewhere = true;
        double r = residual_norm(trial, rhs);
        if (r < res) {
          accepted = s;
          trial_res = r;
          trial_margin = margin;
          break;
        }
      }
      if (accepted == 0) {
        if (!cone_ok_somewhere) {
          // locate a witness at the smallest step
          GridField w = u;
          for (int kk = 1; kk < n - 1; ++kk)
            for (int jj = 1; jj < n - 1; ++jj)
              for (int ii = 1; ii < n - 1; ++ii)
                w.at(ii, jj, kk) = u.at(ii, jj, kk) +
                                   std::pow(0.5, 10) *
                                       v[interior_index(u, ii, jj, kk)];
          for (int kk = 1; kk < n - 1; ++kk)
            for (int jj = 1; jj < n - 1; ++jj)
              for (int ii = 1; ii < n - 1; ++ii) {
                Vec3 du;
                SymMat3 d2u;
                jet2_at(w, ii, jj, kk, du, d2u);
                if (!in_gamma2(d2u, params.tau).inside)
                  throw ConeExit("solve_dirichlet: cone exit at every step",
                                 w.point(ii, jj, kk));
              }
        }
        throw NonConvergence(
            "solve_dirichlet: no damping step reduces the residual", stats);
      }
      u = trial;
      res = trial_res;
      ++stats.iterations;
      stats.residual_history.push_back(res);
      stats.damping_history.push_back(accepted);
      stats.cone_margin_history.push_back(trial_margin);
      done = res <= params.tol;
    }
  }
  stats.converged = true;
  return {std::move(u), std::move(stats)};
}

std::vector<ConvergenceRow> convergence_study(const ManufacturedSolution& s,
                                              const std::vector<int>& grids,
                                              double a, double b,
                                              SolveParams params) {
  if (grids.size() < 1)
    throw std::invalid_argument("convergence_study: no grids");
  auto exact = [&](const Vec3& x) { return s.jet(x).u; };
  // curvature of the exact solution at the box center seeds the iterate
  Vec3 center{0.5 * (a + b), 0.5 * (a + b), 0.5 * (a + b)};
  params.init_a = s.jet(center).d2u.trace() / 3.0;
  std::vector<ConvergenceRow> rows;
  for (int n : grids) {
    auto [u, stats] = solve_dirichlet(s.rhs, exact, a, b, n, params);
    ConvergenceRow row;
    row.n = n;
    row.h = u.h();
    double scale = 0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          double e = std::abs(u.at(i, j, k) - exact(u.point(i, j, k)));
          row.max_error = std::max(row.max_error, e);
          scale = std::max(scale, std::abs(u.at(i, j, k)));
        }
    row.exact = row.max_error <= 1e-11 * (1 + scale);
    if (!rows.empty() && !row.exact && !rows.back().exact)
      row.order = std::log(rows.back().max_error / row.max_error) /
                  std::log(row.h > 0 ? rows.back().h / row.h : 2.0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace s2l
