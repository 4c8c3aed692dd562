#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigma2lab/symmat3.hpp"

namespace s2l {

// Symmetric third-order coefficient array in 3 variables: 10 independent
// entries stored by sorted multi-index i <= j <= k.
struct Deriv3 {
  std::array<double, 10> v{};

  static int index(int i, int j, int k);
  double operator()(int i, int j, int k) const { return v[index(i, j, k)]; }
  void set(int i, int j, int k, double val) { v[index(i, j, k)] = val; }
};

// Symmetric fourth-order coefficient array: 15 independent entries.
struct Deriv4 {
  std::array<double, 15> v{};

  static int index(int i, int j, int k, int l);
  double operator()(int i, int j, int k, int l) const {
    return v[index(i, j, k, l)];
  }
  void set(int i, int j, int k, int l, double val) {
    v[index(i, j, k, l)] = val;
  }
};

// Pointwise jet of a scalar function on R^3. Fourth derivatives are optional
// because finite-difference sampling stops at third order.
struct Jet3 {
  Vec3 x{};
  double u = 0;
  Vec3 du{};
  SymMat3 d2u;
  Deriv3 d3u;
  std::optional<Deriv4> d4u;
};

// (k,l) |-> u_kli, the i-th derivative of the Hessian
SymMat3 d3_slice(const Deriv3& t, int i);
// (k,l) |-> u_klij
SymMat3 d4_slice(const Deriv4& t, int i, int j);

// Rotate a third-order symmetric tensor by q (columns = new frame):
// out(i,j,k) = sum t(a,b,c) q(a,i) q(b,j) q(c,k).
Deriv3 rotate_into(const Deriv3& t, const Mat3& q);

// Right-hand side f(x, u, p) with the partial derivatives the second
// differentiation of the equation needs. Mixed blocks follow the argument
// order: fxp(i,k) = d^2 f / dx_i dp_k.
struct RhsEval {
  double value = 0;
  Vec3 fx{};
  double fu = 0;
  Vec3 fp{};
  SymMat3 fxx;
  Vec3 fxu{};
  Mat3 fxp{};
  double fuu = 0;
  Vec3 fup{};
  SymMat3 fpp;
};

struct RhsModel {
  std::string name;
  std::function<RhsEval(const Vec3& x, double u, const Vec3& p)> eval;
  bool pure_x = true;  // no (u, p) dependence
};

// Total derivatives of x |-> f(x, u(x), Du(x)) along the jet.
Vec3 total_gradient(const RhsEval& e, const Jet3& j);
// Needs third derivatives of u; d4 is not involved.
SymMat3 total_hessian(const RhsEval& e, const Jet3& j);

// An exact solution with a consistent right-hand side: sigma2(D^2 u(x)) =
// f(x, u(x), Du(x)) identically, with f positive on the stated domain.
struct ManufacturedSolution {
  std::string name;
  std::function<Jet3(const Vec3&)> jet;
  RhsModel rhs;
};

// u = x.Ax/2 + b.x + c, f = sigma2(A) constant. A must be in Gamma_2.
ManufacturedSolution mms_quad(const SymMat3& a, const Vec3& b, double c);
// u = a|x|^2/2 + eps*x1*x2*x3: harmonic cubic perturbation,
// f = 3a^2 - eps^2 |x|^2, Laplacian identically 3a.
ManufacturedSolution mms_cubic_pert(double a, double eps);
// u = a|x|^2/2 + eps * prod_i sin(k x_i + pi/4); rhs derived from the jet.
ManufacturedSolution mms_trig_pert(double a, double eps, double k);
// u = a|x|^2/2 + c x1^3, f = 3a^2 + 12 a c x1.
ManufacturedSolution mms_cubic_axis(double a, double c);

// Adds explicit (u, p) dependence that vanishes on the base solution:
// f(x,u,p) = f0(x) + mu (u - u0(x)) + nu . (p - Du0(x)). Same solution,
// nontrivial fu and fp.
ManufacturedSolution couple(const ManufacturedSolution& base, double mu,
                            const Vec3& nu);

// The instances the verification suites run over.
std::vector<ManufacturedSolution> standard_catalog();

// sigma2(D^2 u) - f at x; zero up to roundoff for every catalog entry.
double mms_residual(const ManufacturedSolution& s, const Vec3& x);

// Raised when an operation needs jet data that is not present (typically
// fourth derivatives on finite-difference jets).
struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Builds the pure-x rhs model from an analytic jet provider. fxx needs
// fourth derivatives; throws CapabilityError without them.
RhsModel rhs_from_jet(const std::string& name,
                      std::function<Jet3(const Vec3&)> jet);

// u_t(x) = u(tx)/t^2 with the matching rhs f_t(x) = f(tx). The Hessian is
// sampled at tx unchanged, so every pointwise quantity is scale-covariant.
// Only defined for pure-x right-hand sides.
ManufacturedSolution rescale(const ManufacturedSolution& base, double t);

}  // namespace s2l
