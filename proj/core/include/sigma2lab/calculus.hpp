#pragma once

#include "sigma2lab/jets.hpp"

namespace s2l {

// Evaluates the rhs model on the jet's own (x, u, Du).
RhsEval eval_rhs(const RhsModel& m, const Jet3& j);

// Residuals of the once- and twice-differentiated equation.
// r1[i] = sigma2^{kl} u_kli - F_i
// r2[i] = sigma2^{kl} u_klii + sum_{k!=l}(u_kki u_lli - u_kli^2) - F_ii
// where F_i, F_ii are total derivatives of f(x, u, Du) along u.
// r2 needs fourth derivatives: CapabilityError without them.
struct Lemma1Residuals {
  Vec3 r1{};
  Vec3 r2{};
};
Vec3 lemma1_r1(const Jet3& jet, const RhsEval& rhs);
Lemma1Residuals lemma1_residuals(const Jet3& jet, const RhsEval& rhs);

// g_ratio = |DF| / (1 + lap u)
// h_ratio = max_ij |F_ij - sum_p f_{p} u_pij| / (1 + lap u)^2
// Both track the constants of the gradient/Hessian bounds on f; they are
// reported, not asserted against a fixed C.
struct GradientBoundRatios {
  double g_ratio = 0;
  double h_ratio = 0;
};
GradientBoundRatios gradient_bound_ratios(const Jet3& jet,
                                          const RhsEval& rhs);

struct ResidualReport {
  double residual = 0;
  double c_required = 0;
};

// b = log(lap u):
// residual = sigma2^{ij} b_ij - eps sigma2^{ij} b_i b_j - sum_i f_{p_i} b_i,
// c_required = max(0, -residual)/lap u. Needs d4; the _given overload takes
// externally computed b derivatives (finite differences of a b-field).
ResidualReport logb_residual(const Jet3& jet, const RhsEval& rhs,
                             double eps = 0.01);
ResidualReport logb_residual_given(const Jet3& jet, const RhsEval& rhs,
                                   const Vec3& bgrad, const SymMat3& bhess,
                                   double eps = 0.01);

// V = log(f sigma1 - sigma3):
// residual = sigma2^{ij} V_ij - sum_i f_{p_i} V_i,
// c_required = max(0, -residual)/sigma1.
ResidualReport subv_residual(const Jet3& jet, const RhsEval& rhs);
ResidualReport subv_residual_given(const Jet3& jet, const RhsEval& rhs,
                                   const Vec3& vgrad, const SymMat3& vhess);

// N = f sigma1 - sigma3 along the solution, with total derivatives.
// grad is d4-free; hess throws CapabilityError without fourth derivatives.
struct WeightJet {
  double value = 0;
  Vec3 grad{};
  SymMat3 hess;
  bool has_hess = false;
};
WeightJet weight_jet(const Jet3& jet, const RhsEval& rhs,
                     bool need_hess = true);

// The four-part eigenframe split of sigma2^{ij} V_ij, post-substitution
// (pure third derivatives eliminated through the differentiated equation).
// mismatch = |part1+part2+part3+part4 - direct|; the direct value is
// frame-free and always present. Below the separation threshold the split
// is frame-ambiguous and skipped.
struct VParts {
  double part1 = 0, part2 = 0, part3 = 0, part4 = 0;
  double direct = 0;
  double mismatch = 0;
  double separation = 0;  // min eigenvalue gap of D2u
  bool skipped = false;
};
VParts v_decomposition(const Jet3& jet, const RhsEval& rhs,
                       double min_separation = 1e-8);

// sigma2^{ij} (sigma1)_ij - lap F + |DF|^2/(2f); nonnegative by concavity
// of sigma2^(1/2) on the cone. Needs d4.
double concavity_margin(const Jet3& jet, const RhsEval& rhs);

// Admissibility scan of a manufactured solution over a box lattice.
struct AdmissibilityReport {
  bool ok = true;
  Vec3 witness{};
  double min_margin = 0;  // min cone margin over the lattice
  double max_residual = 0;  // max |sigma2(D2u) - f|
};
AdmissibilityReport check_admissible(const ManufacturedSolution& s,
                                     const Vec3& lo, const Vec3& hi,
                                     int per_axis, double tau = 1e-6);

}  // namespace s2l
