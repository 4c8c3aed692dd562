#pragma once

#include <array>

#include "sigma2lab/grid.hpp"
#include "sigma2lab/graphgeom.hpp"

namespace s2l {

// Axis-aligned box region (sup-norm ball).
struct BoxRegion {
  Vec3 center{};
  double half = 0;
  bool contains(const Vec3& x) const {
    for (int d = 0; d < 3; ++d)
      if (std::fabs(x[d] - center[d]) > half + 1e-12) return false;
    return true;
  }
};

// Concentric boxes with half-widths in ratio 1:2:3:4:5, shrunk by
// margin_cells*h so the largest one keeps clear of the stencil boundary.
std::array<BoxRegion, 5> nested_regions(const GridField& u,
                                        double margin_cells = 3);

// Node of the largest sigma1 (FD trace) inside a region; first hit wins ties.
NodeIndex argmax_sigma1(const GridField& u, const BoxRegion& region);

struct TestQuantityParams {
  double beta = 0;  // 1200/c2 + 3 unless overridden
  double c2 = 1.0 / 3.0;
  double du_max = 0;  // >= sup |Du| over the working region
  double u_max = 0;   // >= sup |u|
  double m1 = 0;      // sup of sigma1 over the inner region
  double m5 = 0;      // sup of sigma1 over the outer region
  double floor20 = 20.0;
  double r_out = 0;  // rho(x) = r_out^2 - |x - center|^2
};

// Measure du_max/u_max/m1/m5 from the field and fill the derived constants.
TestQuantityParams measure_params(const GridField& u, const RhsModel& rhs,
                                  const std::array<BoxRegion, 5>& regions);

// log log max{ratio, floor}; where ratio <= floor the result is the exact
// double log(log(floor)), so the floor semantics can be checked bitwise.
double floor_term(double ratio, double floor20);

struct FieldReport {
  GridField values;  // NaN outside the region
  NodeIndex argmax;
  double max = 0;
  int evaluated = 0;
};

// P = 2 log rho + g(x.Du - u) + log log max{sigma1/M1, 20},
// g(t) = -(1/2beta) log(1 - t/(20 du_max + 2 u_max + 1)).
FieldReport eval_P(const GridField& u, const RhsModel& rhs,
                   const TestQuantityParams& p, const BoxRegion& region);

// phi = 4 log rho + h(|Du|^2/2) + log log max{w sqrt(log M5)/(M5 log w), 20},
// w = sigma1 f - sigma3, h(t) = -(1/2) log(1 - t/(2 du_max^2 + 1)).
FieldReport eval_phi(const GridField& u, const RhsModel& rhs,
                     const TestQuantityParams& p, const BoxRegion& region);

// sup_outer sigma1 / sup_inner sigma1; >= 1 by inclusion.
double doubling_ratio(const GridField& u, const BoxRegion& inner,
                      const BoxRegion& outer);

// w <= (M5/log^{1/2} M5) log w at nodes of the check region with w >= 20;
// the comparison constant is suppressed, so margins are recorded (signs and
// counts), not asserted.
struct V1Report {
  GridField margin;  // rhs - lhs where eligible, NaN elsewhere
  int checked = 0;
  int skipped = 0;
  int violations = 0;
  double min_margin = 0;
  double m5 = 0;
  bool m5_eligible = false;  // m5 >= e^2
};
V1Report v1_check(const GridField& u, const RhsModel& rhs,
                  const BoxRegion& check_region, const BoxRegion& outer,
                  double floor = 20.0);

// Integral chain around the maximum point x0 (b := log sigma1 throughout):
//   t_meanvalue = int_{B1(x0)} sigma1 (f sigma1 - sigma3)
//   t_entropy   = int_{B1(x0)} sigma1 log sigma1
//   t_gradb     = int_{B2(x0)} |grad b|
//   t_energy    = int_{B3(x0)} phi_c^2 sigma2^{ij} b_i b_j
// with a product-quintic cutoff phi_c (1 on B2, 0 outside B3). The audit
// reports the measured link constants and the absorption bound
//   t_energy <= 200 (200 a_grad + c_star a_sigma1 + a_fp + disc),
// which mirrors the Young split (eps = 1/100 pointwise, eps-hat = 1/400
// on the integrated cross term) of the log-b inequality.
struct ChainAudit {
  double t_meanvalue = 0;
  double t_entropy = 0;
  double t_gradb = 0;
  double t_energy = 0;
  double a_grad = 0;    // int sigma2^{ij} (phi_c)_i (phi_c)_j
  double a_sigma1 = 0;  // int phi_c^2 sigma1
  double a_fp = 0;      // |int phi_c^2 f_p . grad b|
  double disc = 0;      // |int phi_c^2 sigma2^{ij} b_ij + 2 int phi_c (phi_c)_j sigma2^{ij} b_i|
  double c_star = 0;    // measured constant of the pointwise log-b inequality
  double c_min = 0;     // min eigenvalue of sigma1 sigma2^{ij} over B3 nodes
  double c_a = 0;       // t_gradb^2 / (t_energy int_{B2} sigma1)
  double c_b = 0;       // t_entropy / (1 + t_gradb)
  double implied_bound = 0;
  double absorption_margin = 0;  // implied_bound - t_energy
  double holder_margin = 0;      // rigorous Cauchy-Schwarz link margin
  double m1 = 0;
  double cutoff_grad_bound = 0;  // declared sup(|grad phi_c| + |hess phi_c|)
  double base_half = 0;          // half-width of B1(x0)
  int nodes = 0;                 // nodes inside B3
};
ChainAudit integral_chain_audit(const GridField& u, const RhsModel& rhs,
                                NodeIndex x0);

}  // namespace s2l
