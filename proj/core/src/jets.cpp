#include "sigma2lab/jets.hpp"

#include <algorithm>
#include <cmath>

namespace s2l {

int Deriv3::index(int i, int j, int k) {
  if (i > j) std::swap(i, j);
  if (j > k) std::swap(j, k);
  if (i > j) std::swap(i, j);
  // sorted triples over {0,1,2} in lexicographic order
  static constexpr int tab[3][3][3] = {
      {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}},
      {{-1, -1, -1}, {-1, 6, 7}, {-1, -1, 8}},
      {{-1, -1, -1}, {-1, -1, -1}, {-1, -1, 9}}};
  return tab[i][j][k];
}

int Deriv4::index(int i, int j, int k, int l) {
  int s[4] = {i, j, k, l};
  std::sort(s, s + 4);
  int code = 27 * s[0] + 9 * s[1] + 3 * s[2] + s[3];
  static constexpr int codes[15] = {0,  1,  2,  4,  5,  8,  13, 14,
                                    17, 26, 40, 41, 44, 53, 80};
  for (int n = 0; n < 15; ++n)
    if (codes[n] == code) return n;
  return -1;  // unreachable for indices in {0,1,2}
}

SymMat3 d3_slice(const Deriv3& t, int i) {
  SymMat3 m;
  for (int k = 0; k < 3; ++k)
    for (int l = k; l < 3; ++l) m.set(k, l, t(k, l, i));
  return m;
}

SymMat3 d4_slice(const Deriv4& t, int i, int j) {
  SymMat3 m;
  for (int k = 0; k < 3; ++k)
    for (int l = k; l < 3; ++l) m.set(k, l, t(k, l, i, j));
  return m;
}

Deriv3 rotate_into(const Deriv3& t, const Mat3& q) {
  Deriv3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = j; k < 3; ++k) {
        double s = 0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
              s += t(a, b, c) * q(a, i) * q(b, j) * q(c, k);
        out.set(i, j, k, s);
      }
  return out;
}

Vec3 total_gradient(const RhsEval& e, const Jet3& j) {
  Vec3 g{};
  for (int i = 0; i < 3; ++i) {
    g[i] = e.fx[i] + e.fu * j.du[i];
    for (int k = 0; k < 3; ++k) g[i] += e.fp[k] * j.d2u(k, i);
  }
  return g;
}

SymMat3 total_hessian(const RhsEval& e, const Jet3& j) {
  SymMat3 h;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      double v = e.fxx(a, b) + e.fxu[a] * j.du[b] + e.fxu[b] * j.du[a] +
                 e.fuu * j.du[a] * j.du[b] + e.fu * j.d2u(a, b);
      for (int k = 0; k < 3; ++k) {
        v += e.fxp(a, k) * j.d2u(k, b) + e.fxp(b, k) * j.d2u(k, a);
        v += e.fup[k] * (j.du[a] * j.d2u(k, b) + j.du[b] * j.d2u(k, a));
        v += e.fp[k] * j.d3u(k, a, b);
        for (int l = 0; l < 3; ++l)
          v += e.fpp(k, l) * j.d2u(k, a) * j.d2u(l, b);
      }
      h.set(a, b, v);
    }
  return h;
}

namespace {

void require_gamma2(const SymMat3& a, const char* who) {
  Sigmas s = sigma_all(a);
  if (!(s.s1 > 0 && s.s2 > 0))
    throw std::invalid_argument(std::string(who) +
                                ": Hessian outside Gamma_2");
}

}  // namespace

ManufacturedSolution mms_quad(const SymMat3& a, const Vec3& b, double c) {
  require_gamma2(a, "mms_quad");
  double f0 = sigma_all(a).s2;
  ManufacturedSolution s;
  s.name = "quad";
  s.jet = [a, b, c](const Vec3& x) {
    Jet3 j;
    j.x = x;
    Vec3 ax = matvec(a.dense(), x);
    j.u = 0.5 * dot(x, ax) + dot(b, x) + c;
    j.du = ax + b;
    j.d2u = a;
    j.d4u = Deriv4{};
    return j;
  };
  s.rhs.name = "quad";
  s.rhs.pure_x = true;
  s.rhs.eval = [f0](const Vec3&, double, const Vec3&) {
    RhsEval e;
    e.value = f0;
    return e;
  };
  return s;
}

ManufacturedSolution mms_cubic_pert(double a, double eps) {
  ManufacturedSolution s;
  s.name = "cubic-pert";
  s.jet = [a, eps](const Vec3& x) {
    Jet3 j;
    j.x = x;
    j.u = 0.5 * a * norm2(x) + eps * x[0] * x[1] * x[2];
    j.du = {a * x[0] + eps * x[1] * x[2], a * x[1] + eps * x[0] * x[2],
            a * x[2] + eps * x[0] * x[1]};
    j.d2u = SymMat3::diag(a, a, a);
    j.d2u.a12 = eps * x[2];
    j.d2u.a13 = eps * x[1];
    j.d2u.a23 = eps * x[0];
    j.d3u.set(0, 1, 2, eps);
    j.d4u = Deriv4{};
    return j;
  };
  s.rhs.name = "cubic-pert";
  s.rhs.pure_x = true;
  s.rhs.eval = [a, eps](const Vec3& x, double, const Vec3&) {
    RhsEval e;
    e.value = 3 * a * a - eps * eps * norm2(x);
    e.fx = -2 * eps * eps * x;
    e.fxx = SymMat3::diag(-2 * eps * eps, -2 * eps * eps, -2 * eps * eps);
    return e;
  };
  return s;
}

ManufacturedSolution mms_trig_pert(double a, double eps, double k) {
  // d^n/dt^n sin(k t) = k^n sin(k t + n pi/2)
  auto sd = [k](int order, double t) {
    return std::pow(k, order) *
           std::sin(k * t + order * 1.57079632679489661923);
  };
  auto jet = [a, eps, sd](const Vec3& x) {
    double d[3][5];
    for (int i = 0; i < 3; ++i)
      for (int n = 0; n <= 4; ++n) d[i][n] = sd(n, x[i]);
    auto pert = [&](int n0, int n1, int n2) {
      return eps * d[0][n0] * d[1][n1] * d[2][n2];
    };
    auto order = [](int i, int* n) { ++n[i]; };
    Jet3 j;
    j.x = x;
    j.u = 0.5 * a * norm2(x) + pert(0, 0, 0);
    for (int i = 0; i < 3; ++i) {
      int n[3] = {0, 0, 0};
      order(i, n);
      j.du[i] = a * x[i] + pert(n[0], n[1], n[2]);
    }
    for (int i = 0; i < 3; ++i)
      for (int jj = i; jj < 3; ++jj) {
        int n[3] = {0, 0, 0};
        order(i, n);
        order(jj, n);
        j.d2u.set(i, jj, (i == jj ? a : 0.0) + pert(n[0], n[1], n[2]));
      }
    for (int i = 0; i < 3; ++i)
      for (int jj = i; jj < 3; ++jj)
        for (int kk = jj; kk < 3; ++kk) {
          int n[3] = {0, 0, 0};
          order(i, n);
          order(jj, n);
          order(kk, n);
          j.d3u.set(i, jj, kk, pert(n[0], n[1], n[2]));
        }
    Deriv4 d4;
    for (int i = 0; i < 3; ++i)
      for (int jj = i; jj < 3; ++jj)
        for (int kk = jj; kk < 3; ++kk)
          for (int ll = kk; ll < 3; ++ll) {
            int n[3] = {0, 0, 0};
            order(i, n);
            order(jj, n);
            order(kk, n);
            order(ll, n);
            d4.set(i, jj, kk, ll, pert(n[0], n[1], n[2]));
          }
    j.d4u = d4;
    return j;
  };
  ManufacturedSolution s;
  s.name = "trig-pert";
  s.jet = jet;
  s.rhs = rhs_from_jet("trig-pert", jet);
  return s;
}

ManufacturedSolution mms_cubic_axis(double a, double c) {
  ManufacturedSolution s;
  s.name = "cubic-axis";
  s.jet = [a, c](const Vec3& x) {
    Jet3 j;
    j.x = x;
    j.u = 0.5 * a * norm2(x) + c * x[0] * x[0] * x[0];
    j.du = {a * x[0] + 3 * c * x[0] * x[0], a * x[1], a * x[2]};
    j.d2u = SymMat3::diag(a + 6 * c * x[0], a, a);
    j.d3u.set(0, 0, 0, 6 * c);
    j.d4u = Deriv4{};
    return j;
  };
  s.rhs.name = "cubic-axis";
  s.rhs.pure_x = true;
  s.rhs.eval = [a, c](const Vec3& x, double, const Vec3&) {
    RhsEval e;
    e.value = 3 * a * a + 12 * a * c * x[0];
    e.fx = {12 * a * c, 0, 0};
    return e;
  };
  return s;
}

ManufacturedSolution couple(const ManufacturedSolution& base, double mu,
                            const Vec3& nu) {
  if (!base.rhs.pure_x)
    throw std::invalid_argument("couple: base rhs already depends on (u,p)");
  ManufacturedSolution s;
  s.name = base.name + "-coupled";
  s.jet = base.jet;
  s.rhs.name = s.name;
  s.rhs.pure_x = false;
  auto base_jet = base.jet;
  auto base_eval = base.rhs.eval;
  s.rhs.eval = [base_jet, base_eval, mu, nu](const Vec3& x, double u,
                                             const Vec3& p) {
    Jet3 j0 = base_jet(x);
    RhsEval e = base_eval(x, 0, Vec3{});
    e.value += mu * (u - j0.u) + dot(nu, p - j0.du);
    e.fu = mu;
    e.fp = nu;
    // d/dx of the correction at fixed (u, p)
    for (int i = 0; i < 3; ++i) {
      e.fx[i] -= mu * j0.du[i];
      for (int k = 0; k < 3; ++k) e.fx[i] -= nu[k] * j0.d2u(k, i);
    }
    for (int i = 0; i < 3; ++i)
      for (int jj = i; jj < 3; ++jj) {
        double v = e.fxx(i, jj) - mu * j0.d2u(i, jj);
        for (int k = 0; k < 3; ++k) v -= nu[k] * j0.d3u(k, i, jj);
        e.fxx.set(i, jj, v);
      }
    return e;
  };
  return s;
}

RhsModel rhs_from_jet(const std::string& name,
                      std::function<Jet3(const Vec3&)> jet) {
  RhsModel m;
  m.name = name;
  m.pure_x = true;
  m.eval = [jet, name](const Vec3& x, double, const Vec3&) {
    Jet3 j = jet(x);
    if (!j.d4u)
      throw CapabilityError(name + ": rhs_from_jet needs fourth derivatives");
    RhsEval e;
    e.value = sigma_all(j.d2u).s2;
    SymMat3 grad = sigma2_gradient(j.d2u);
    SymMat3 slice[3];
    for (int i = 0; i < 3; ++i) slice[i] = d3_slice(j.d3u, i);
    for (int i = 0; i < 3; ++i) e.fx[i] = inner(grad, slice[i]);
    for (int i = 0; i < 3; ++i)
      for (int jj = i; jj < 3; ++jj)
        e.fxx.set(i, jj, d2sigma2(slice[i], slice[jj]) +
                             inner(grad, d4_slice(*j.d4u, i, jj)));
    return e;
  };
  return m;
}

ManufacturedSolution rescale(const ManufacturedSolution& base, double t) {
  if (!base.rhs.pure_x)
    throw std::invalid_argument("rescale: rhs must be pure-x");
  if (!(t > 0)) throw std::invalid_argument("rescale: t must be positive");
  ManufacturedSolution s;
  s.name = base.name + "-rescaled";
  auto base_jet = base.jet;
  s.jet = [base_jet, t](const Vec3& x) {
    Jet3 j0 = base_jet(t * x);
    Jet3 j;
    j.x = x;
    j.u = j0.u / (t * t);
    j.du = (1.0 / t) * j0.du;
    j.d2u = j0.d2u;
    for (int n = 0; n < 10; ++n) j.d3u.v[n] = t * j0.d3u.v[n];
    if (j0.d4u) {
      Deriv4 d4;
      for (int n = 0; n < 15; ++n) d4.v[n] = t * t * j0.d4u->v[n];
      j.d4u = d4;
    }
    return j;
  };
  auto base_eval = base.rhs.eval;
  s.rhs.name = s.name;
  s.rhs.pure_x = true;
  s.rhs.eval = [base_eval, t](const Vec3& x, double, const Vec3&) {
    RhsEval e0 = base_eval(t * x, 0, Vec3{});
    RhsEval e;
    e.value = e0.value;
    e.fx = t * e0.fx;
    e.fxx = e0.fxx * (t * t);
    return e;
  };
  return s;
}

std::vector<ManufacturedSolution> standard_catalog() {
  SymMat3 a;
  a.a11 = 1.3;
  a.a22 = 1.0;
  a.a33 = 0.5;
  a.a12 = 0.2;
  a.a13 = -0.1;
  a.a23 = 0.15;
  std::vector<ManufacturedSolution> cat;
  cat.push_back(mms_quad(SymMat3::identity(), Vec3{}, 0.0));
  cat.back().name = "quad-iso";
  cat.push_back(mms_quad(a, {0.1, -0.2, 0.3}, 0.7));
  cat.back().name = "quad-aniso";
  cat.push_back(mms_cubic_pert(1.0, 0.25));
  cat.push_back(mms_trig_pert(1.0, 0.05, 2.0));
  cat.push_back(mms_cubic_axis(1.0, 1.0 / 12.0));
  cat.push_back(couple(mms_cubic_pert(1.0, 0.25), 0.3, {0.1, -0.2, 0.05}));
  return cat;
}

double mms_residual(const ManufacturedSolution& s, const Vec3& x) {
  Jet3 j = s.jet(x);
  RhsEval e = s.rhs.eval(x, j.u, j.du);
  return sigma_all(j.d2u).s2 - e.value;
}

}  // namespace s2l
