#pragma once

#include "sigma2lab/grid.hpp"

namespace s2l {

// Gauge distance on the gradient graph, relative to a center y0 with cached
// gradient du0:
//   r^2 = f(x,u,Du) |x-y0|^2 + |Du(x) - du0|^2.
double graph_radius(const Jet3& jet, const RhsEval& rhs, const Vec3& y0,
                    const Vec3& du0);

// r and its spatial gradient 2 r r_i = F_i|x-y0|^2 + 2f (x-y0)_i
//                                      + 2 (u_k - du0_k) u_ki.
struct GraphGauge {
  double r = 0;
  Vec3 grad{};
};
GraphGauge graph_gauge(const Jet3& jet, const RhsEval& rhs, const Vec3& y0,
                       const Vec3& du0);

// sigma1 * (f sigma1 - sigma3): the integrand of the mean value inequality;
// strictly positive on the cone.
double weighted_density(const Jet3& jet, const RhsEval& rhs);

// sigma2^{ij} r_i r_j / (f sigma1 - sigma3). Equals 1 identically on
// quadratic solutions; the excess over 1, divided by r, is the empirical
// constant of the gauge-gradient bound.
double cla_ratio(const Jet3& jet, const RhsEval& rhs, const Vec3& y0,
                 const Vec3& du0);

struct NodeIndex {
  int i = 0, j = 0, k = 0;
};

// Quadrature of a density over the sublevel set {r <= delta}.
//  Sharp:        midpoint rule over nodes with r <= delta (O(h) from the
//                indicator).
//  CellFraction: per-cell inside fractions; straddling cells sample the
//                gauge on subcolumns^2 columns x subcolumns+1 knots, with
//                u and Du interpolated but |x-y0|^2 exact, and integrate
//                the crossings segment-linearly (default).
//  Smoothed:     node weights from a quintic step of width smooth_cells*h.
struct BallQuadParams {
  enum class Mode { Sharp, CellFraction, Smoothed };
  Mode mode = Mode::CellFraction;
  int subcolumns = 4;
  double smooth_cells = 2.0;
};

double ball_mass(const GridField& u, const RhsModel& rhs, NodeIndex y0,
                 double delta, const BallQuadParams& q = {});

struct MassProfile {
  std::vector<double> radii;
  std::vector<double> masses;
  std::vector<double> ratios;  // mass / delta^3
  double c_emp = 1;            // max over delta < R of ratio(delta)/ratio(R)
};
MassProfile monotonicity_profile(const GridField& u, const RhsModel& rhs,
                                 NodeIndex y0,
                                 const std::vector<double>& radii,
                                 const BallQuadParams& q = {});

// sigma1(y0) / (integral of the weighted density over the Euclidean ball
// B_R(y0), divided by R^3). The R^3 normalization makes the value
// radius-free on Hessian-constant fields: 3/(32 pi) for the isotropic
// quadratic.
double mean_value_ratio(const GridField& u, const RhsModel& rhs, NodeIndex y0,
                        double radius, const BallQuadParams& q = {});

// Eigenvalue comparison chain for the weight N = f sigma1 - sigma3 at a
// cone point (f := sigma2(lambda), lambda ordered):
//   m_lower    = N - (f l1 + l1 l3^2)                  >= 0 exactly
//   identity   = l1 l2 - (f - l1 l3 - l2 l3)           == 0 exactly
//   m_upper    = (1/l1 + 1/sqrt(f)) N - l1 l2          >= 0
//   m_neg      = N - 2 sqrt(f) l1 |l3| when l3 < 0     >= 0 (else 0)
// plus the two looser comparison ratios tracked empirically (constants, not
// certified bounds):
//   ratio_lower = -l2 l3 / N (l3 < 0, else 0), ratio_upper = l1 l2 / N.
struct LambdaChainReport {
  double m_lower = 0;
  double identity = 0;
  double m_upper = 0;
  double m_neg = 0;
  double ratio_lower = 0;
  double ratio_upper = 0;
};
LambdaChainReport lambda_chain(const Vec3& lambda);

}  // namespace s2l
