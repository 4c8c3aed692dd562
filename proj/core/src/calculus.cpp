#include "sigma2lab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace s2l {

RhsEval eval_rhs(const RhsModel& m, const Jet3& j) {
  return m.eval(j.x, j.u, j.du);
}

namespace {

void require_d4(const Jet3& jet, const char* who) {
  if (!jet.d4u)
    throw CapabilityError(std::string(who) + ": fourth derivatives required");
}

// (sigma1)_ij = sum_k u_kkij
SymMat3 lap_hessian(const Deriv4& d4) {
  SymMat3 s;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      s.set(i, j, d4(0, 0, i, j) + d4(1, 1, i, j) + d4(2, 2, i, j));
  return s;
}

}  // namespace

Vec3 lemma1_r1(const Jet3& jet, const RhsEval& rhs) {
  SymMat3 grad = sigma2_gradient(jet.d2u);
  Vec3 fg = total_gradient(rhs, jet);
  Vec3 r;
  for (int i = 0; i < 3; ++i)
    r[i] = inner(grad, d3_slice(jet.d3u, i)) - fg[i];
  return r;
}

Lemma1Residuals lemma1_residuals(const Jet3& jet, const RhsEval& rhs) {
  require_d4(jet, "lemma1_residuals");
  Lemma1Residuals out;
  out.r1 = lemma1_r1(jet, rhs);
  SymMat3 grad = sigma2_gradient(jet.d2u);
  SymMat3 fh = total_hessian(rhs, jet);
  for (int i = 0; i < 3; ++i) {
    SymMat3 b = d3_slice(jet.d3u, i);
    // sum_{k!=l} (u_kki u_lli - u_kli^2), the n=3 second-derivative quadratic
    double quad = 0;
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        if (k != l) quad += b(k, k) * b(l, l) - b(k, l) * b(k, l);
    out.r2[i] = inner(grad, d4_slice(*jet.d4u, i, i)) + quad - fh(i, i);
  }
  return out;
}

GradientBoundRatios gradient_bound_ratios(const Jet3& jet,
                                          const RhsEval& rhs) {
  double lap = jet.d2u.trace();
  if (!(lap > 0))
    throw std::domain_error("gradient_bound_ratios: lap u must be positive");
  GradientBoundRatios r;
  Vec3 fg = total_gradient(rhs, jet);
  r.g_ratio = norm(fg) / (1 + lap);
  SymMat3 fh = total_hessian(rhs, jet);
  double worst = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      double third = 0;  // sum_p f_{p_p} u_pij
      for (int p = 0; p < 3; ++p) third += rhs.fp[p] * jet.d3u(p, i, j);
      worst = std::max(worst, std::abs(fh(i, j) - third));
    }
  r.h_ratio = worst / ((1 + lap) * (1 + lap));
  return r;
}

ResidualReport logb_residual_given(const Jet3& jet, const RhsEval& rhs,
                                   const Vec3& bgrad, const SymMat3& bhess,
                                   double eps) {
  double lap = jet.d2u.trace();
  if (!(lap > 0))
    throw std::domain_error("logb_residual: lap u must be positive");
  SymMat3 grad = sigma2_gradient(jet.d2u);
  SymMat3 outer;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) outer.set(i, j, bgrad[i] * bgrad[j]);
  double res =
      inner(grad, bhess) - eps * inner(grad, outer) - dot(rhs.fp, bgrad);
  return {res, std::max(0.0, -res) / lap};
}

ResidualReport logb_residual(const Jet3& jet, const RhsEval& rhs,
                             double eps) {
  require_d4(jet, "logb_residual");
  double lap = jet.d2u.trace();
  if (!(lap > 0))
    throw std::domain_error("logb_residual: lap u must be positive");
  Vec3 lap_grad;
  for (int i = 0; i < 3; ++i) lap_grad[i] = d3_slice(jet.d3u, i).trace();
  SymMat3 lap_hess = lap_hessian(*jet.d4u);
  Vec3 bgrad = (1.0 / lap) * lap_grad;
  SymMat3 bhess;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      bhess.set(i, j, lap_hess(i, j) / lap -
                          lap_grad[i] * lap_grad[j] / (lap * lap));
  return logb_residual_given(jet, rhs, bgrad, bhess, eps);
}

WeightJet weight_jet(const Jet3& jet, const RhsEval& rhs, bool need_hess) {
  Sigmas s = sigma_all(jet.d2u);
  double f = rhs.value;
  WeightJet w;
  w.value = f * s.s1 - s.s3;
  SymMat3 adj = sigma3_gradient(jet.d2u);
  Vec3 fg = total_gradient(rhs, jet);
  SymMat3 slice[3];
  Vec3 s1g, s3g;
  for (int i = 0; i < 3; ++i) {
    slice[i] = d3_slice(jet.d3u, i);
    s1g[i] = slice[i].trace();
    s3g[i] = inner(adj, slice[i]);
  }
  for (int i = 0; i < 3; ++i)
    w.grad[i] = fg[i] * s.s1 + f * s1g[i] - s3g[i];
  if (!need_hess) return w;
  require_d4(jet, "weight_jet");
  SymMat3 fh = total_hessian(rhs, jet);
  SymMat3 s1h = lap_hessian(*jet.d4u);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      double s3h = inner(adj, d4_slice(*jet.d4u, i, j)) +
                   d2sigma3(jet.d2u, slice[i], slice[j]);
      w.hess.set(i, j, fh(i, j) * s.s1 + fg[i] * s1g[j] + fg[j] * s1g[i] +
                           f * s1h(i, j) - s3h);
    }
  w.has_hess = true;
  return w;
}

ResidualReport subv_residual_given(const Jet3& jet, const RhsEval& rhs,
                                   const Vec3& vgrad, const SymMat3& vhess) {
  Sigmas s = sigma_all(jet.d2u);
  SymMat3 grad = sigma2_gradient(jet.d2u);
  double res = inner(grad, vhess) - dot(rhs.fp, vgrad);
  return {res, std::max(0.0, -res) / s.s1};
}

ResidualReport subv_residual(const Jet3& jet, const RhsEval& rhs) {
  WeightJet w = weight_jet(jet, rhs, true);
  if (!(w.value > 0))
    throw std::domain_error("subv_residual: f sigma1 - sigma3 <= 0");
  Vec3 vgrad = (1.0 / w.value) * w.grad;
  SymMat3 vhess;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      vhess.set(i, j, w.hess(i, j) / w.value -
                          w.grad[i] * w.grad[j] / (w.value * w.value));
  return subv_residual_given(jet, rhs, vgrad, vhess);
}

VParts v_decomposition(const Jet3& jet, const RhsEval& rhs,
                       double min_separation) {
  VParts out;
  // frame-free direct value first; it never depends on the eigenframe
  {
    WeightJet w = weight_jet(jet, rhs, true);
    if (!(w.value > 0))
      throw std::domain_error("v_decomposition: f sigma1 - sigma3 <= 0");
    SymMat3 grad = sigma2_gradient(jet.d2u);
    SymMat3 vhess;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        vhess.set(i, j, w.hess(i, j) / w.value -
                            w.grad[i] * w.grad[j] / (w.value * w.value));
    out.direct = inner(grad, vhess);
  }

  EigenTriple eig = eigen_sorted(jet.d2u);
  double scale = 1 + jet.d2u.frob();
  out.separation = std::min(eig.lambda[0] - eig.lambda[1],
                            eig.lambda[1] - eig.lambda[2]);
  if (out.separation < min_separation * scale) {
    out.skipped = true;
    return out;
  }

  // rotate everything into the eigenframe
  const Mat3& q = eig.q;
  Deriv3 t = rotate_into(jet.d3u, q);
  Vec3 fg0 = total_gradient(rhs, jet);
  SymMat3 fh0 = total_hessian(rhs, jet);
  Vec3 fg;
  for (int a = 0; a < 3; ++a) {
    fg[a] = 0;
    for (int i = 0; i < 3; ++i) fg[a] += q(i, a) * fg0[i];
  }
  SymMat3 fh = rotate_into(fh0, q);

  const Vec3& l = eig.lambda;
  double s1 = l[0] + l[1] + l[2];
  double f = rhs.value;
  Vec3 s2d{s1 - l[0], s1 - l[1], s1 - l[2]};           // sigma2^{ii}
  Vec3 s3d{l[1] * l[2], l[0] * l[2], l[0] * l[1]};     // sigma3^{ii}
  double bign = s2d[0] * s2d[1] * s2d[2];              // f s1 - s3

  double p1 = 0, p2 = 0, p3 = 0, p4 = 0;
  for (int i = 0; i < 3; ++i) {
    int k = (i + 1) % 3, p = (i + 2) % 3;
    double uk = t(k, k, i), up = t(p, p, i);
    p1 += -2 * fg[i] * (s2d[k] * uk + s2d[p] * up) +
          2 * (s2d[k] * s2d[k] * uk * uk + s2d[p] * s2d[p] * up * up) +
          4 * (s2d[k] * s2d[p] - s2d[i] * l[i]) * uk * up;
    p3 -= s2d[i] *
          std::pow((l[k] - l[i]) * s2d[k] * uk +
                       (l[p] - l[i]) * s2d[p] * up + (l[i] + s1) * fg[i],
                   2);
  }
  p1 /= bign;
  p3 /= bign * bign;

  double u123 = t(0, 1, 2);
  p2 = (8 * f * u123 * u123 +
        2 * s2d[0] * s2d[1] *
            (t(0, 0, 1) * t(0, 0, 1) + t(0, 1, 1) * t(0, 1, 1)) +
        2 * s2d[0] * s2d[2] *
            (t(0, 0, 2) * t(0, 0, 2) + t(0, 2, 2) * t(0, 2, 2)) +
        2 * s2d[1] * s2d[2] *
            (t(1, 1, 2) * t(1, 1, 2) + t(1, 2, 2) * t(1, 2, 2))) /
       bign;

  Vec3 s1g;
  for (int i = 0; i < 3; ++i)
    s1g[i] = t(0, 0, i) + t(1, 1, i) + t(2, 2, i);
  double tr_fh = fh.trace();
  double s2_fh = 0, s3_fh = 0, cross = 0;
  for (int i = 0; i < 3; ++i) {
    s2_fh += s2d[i] * fh(i, i);
    s3_fh += s3d[i] * fh(i, i);
    cross += s2d[i] * s1g[i] * fg[i];
  }
  p4 = (2 * cross + s1 * s2_fh + f * tr_fh - s3_fh) / bign;

  out.part1 = p1;
  out.part2 = p2;
  out.part3 = p3;
  out.part4 = p4;
  out.mismatch = std::abs(p1 + p2 + p3 + p4 - out.direct);
  return out;
}

double concavity_margin(const Jet3& jet, const RhsEval& rhs) {
  require_d4(jet, "concavity_margin");
  if (!(rhs.value > 0))
    throw std::domain_error("concavity_margin: f must be positive");
  SymMat3 grad = sigma2_gradient(jet.d2u);
  SymMat3 s1h = lap_hessian(*jet.d4u);
  Vec3 fg = total_gradient(rhs, jet);
  SymMat3 fh = total_hessian(rhs, jet);
  return inner(grad, s1h) - fh.trace() + norm2(fg) / (2 * rhs.value);
}

AdmissibilityReport check_admissible(const ManufacturedSolution& s,
                                     const Vec3& lo, const Vec3& hi,
                                     int per_axis, double tau) {
  AdmissibilityReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k) {
        auto coord = [&](int n, double a, double b) {
          return per_axis == 1 ? 0.5 * (a + b)
                               : a + (b - a) * n / double(per_axis - 1);
        };
        Vec3 x{coord(i, lo[0], hi[0]), coord(j, lo[1], hi[1]),
               coord(k, lo[2], hi[2])};
        Jet3 jet = s.jet(x);
        ConeReport cone = in_gamma2(jet.d2u, tau);
        rep.max_residual =
            std::max(rep.max_residual, std::abs(mms_residual(s, x)));
        if (cone.margin < rep.min_margin) {
          rep.min_margin = cone.margin;
          if (!cone.inside) {
            rep.ok = false;
            rep.witness = x;
          }
        }
      }
  return rep;
}

}  // namespace s2l
