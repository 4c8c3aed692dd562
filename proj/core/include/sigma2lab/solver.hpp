#pragma once

#include <utility>

#include "sigma2lab/grid.hpp"

namespace s2l {

struct SolveParams {
  double tol = 1e-10;      // max-norm of the discrete residual
  int max_iter = 40;       // Newton iterations per homotopy stage
  double tau = 1e-8;       // relative cone margin kept by every iterate
  int homotopy_steps = 1;  // boundary-data blend stages
  double lin_tol = 1e-10;  // relative tolerance of the inner Krylov solve
  double init_a = 1.0;     // curvature of the quadratic initial iterate
};

struct SolveStats {
  int iterations = 0;  // accepted Newton steps, summed over stages
  std::vector<double> residual_history;
  std::vector<double> damping_history;
  std::vector<double> cone_margin_history;
  // rows of the last Newton matrix breaking the M-matrix sign pattern
  // (positive diagonal, nonpositive off-diagonals)
  int mmatrix_violations = 0;
  bool converged = false;
};

struct ConeExit : std::runtime_error {
  Vec3 witness{};
  explicit ConeExit(const std::string& msg, const Vec3& node)
      : std::runtime_error(msg), witness(node) {}
};
struct NonConvergence : std::runtime_error {
  SolveStats stats;
  NonConvergence(const std::string& msg, SolveStats s)
      : std::runtime_error(msg), stats(std::move(s)) {}
};
struct LinearSolveFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// u0 = A|x|^2/2 in the interior, boundary overwritten by g.
GridField admissible_init(double a, double b, int n,
                          const std::function<double(const Vec3&)>& g,
                          double A);

// max over interior nodes of |sigma2(D2_h u) - f(x, u, D_h u)|
double residual_norm(const GridField& u, const RhsModel& rhs);

// min over interior nodes of the relative cone margin of D2_h u
double cone_margin(const GridField& u, double tau);

// Damped Newton with boundary-data homotopy. Every accepted iterate stays
// in Gamma_2 with margin >= tau at all interior nodes; the Newton correction
// solves sigma2^{ij} d_ij v - f_p . grad v - f_u v = -residual with zero
// boundary data via BiCGSTAB to lin_tol.
std::pair<GridField, SolveStats> solve_dirichlet(
    const RhsModel& rhs, const std::function<double(const Vec3&)>& g,
    double a, double b, int n, const SolveParams& params = {});

struct ConvergenceRow {
  int n = 0;
  double h = 0;
  double max_error = 0;
  double order = 0;   // from the previous row; 0 on the first
  bool exact = false; // error at round-off level, order meaningless
};

// Solves the manufactured problem on each grid and reports the observed
// order from consecutive error ratios.
std::vector<ConvergenceRow> convergence_study(const ManufacturedSolution& s,
                                              const std::vector<int>& grids,
                                              double a, double b,
                                              SolveParams params = {});

}  // namespace s2l
