#include "sigma2lab/symmat3.hpp"

#include <algorithm>
#include <stdexcept>

namespace s2l {

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

Vec3 matvec(const Mat3& a, const Vec3& v) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i)
    r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
  return r;
}

Mat3 transpose(const Mat3& a) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

double SymMat3::operator()(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == 0) return j == 0 ? a11 : (j == 1 ? a12 : a13);
  if (i == 1) return j == 1 ? a22 : a23;
  return a33;
}

void SymMat3::set(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  if (i == 0) {
    if (j == 0) a11 = v;
    else if (j == 1) a12 = v;
    else a13 = v;
  } else if (i == 1) {
    if (j == 1) a22 = v;
    else a23 = v;
  } else {
    a33 = v;
  }
}

Sigmas sigma_all(const SymMat3& a) {
  Sigmas s;
  s.s1 = a.a11 + a.a22 + a.a33;
  s.s2 = a.a11 * a.a22 + a.a11 * a.a33 + a.a22 * a.a33 - a.a12 * a.a12 -
         a.a13 * a.a13 - a.a23 * a.a23;
  s.s3 = a.a11 * (a.a22 * a.a33 - a.a23 * a.a23) -
         a.a12 * (a.a12 * a.a33 - a.a23 * a.a13) +
         a.a13 * (a.a12 * a.a23 - a.a22 * a.a13);
  return s;
}

Sigmas sigma_from_lambda(const Vec3& l) {
  return {l[0] + l[1] + l[2], l[0] * l[1] + l[0] * l[2] + l[1] * l[2],
          l[0] * l[1] * l[2]};
}

SymMat3 sigma2_gradient(const SymMat3& a) {
  double t = a.trace();
  return {t - a.a11, t - a.a22, t - a.a33, -a.a12, -a.a13, -a.a23};
}

SymMat3 sigma3_gradient(const SymMat3& a) {
  SymMat3 c;
  c.a11 = a.a22 * a.a33 - a.a23 * a.a23;
  c.a22 = a.a11 * a.a33 - a.a13 * a.a13;
  c.a33 = a.a11 * a.a22 - a.a12 * a.a12;
  c.a12 = a.a13 * a.a23 - a.a12 * a.a33;
  c.a13 = a.a12 * a.a23 - a.a13 * a.a22;
  c.a23 = a.a12 * a.a13 - a.a23 * a.a11;
  return c;
}

double dsigma1(const SymMat3& b) { return b.trace(); }

double dsigma2(const SymMat3& a, const SymMat3& b) {
  SymMat3 g = sigma2_gradient(a);
  return g.a11 * b.a11 + g.a22 * b.a22 + g.a33 * b.a33 +
         2 * (g.a12 * b.a12 + g.a13 * b.a13 + g.a23 * b.a23);
}

double d2sigma2(const SymMat3& b, const SymMat3& c) {
  double trbc = b.a11 * c.a11 + b.a22 * c.a22 + b.a33 * c.a33 +
                2 * (b.a12 * c.a12 + b.a13 * c.a13 + b.a23 * c.a23);
  return b.trace() * c.trace() - trbc;
}

double dsigma3(const SymMat3& a, const SymMat3& b) {
  SymMat3 g = sigma3_gradient(a);
  return g.a11 * b.a11 + g.a22 * b.a22 + g.a33 * b.a33 +
         2 * (g.a12 * b.a12 + g.a13 * b.a13 + g.a23 * b.a23);
}

double d2sigma3(const SymMat3& a, const SymMat3& b, const SymMat3& c) {
  // det is a cubic polynomial, so the mixed second directional derivative
  // is recovered exactly by polarization.
  auto det = [](const SymMat3& m) { return sigma_all(m).s3; };
  return 0.25 * (det(a + b + c) - det(a + b - c) - det(a - b + c) +
                 det(a - b - c));
}

SymMat3 rotate_into(const SymMat3& a, const Mat3& q) {
  return SymMat3::from_dense(matmul(transpose(q), matmul(a.dense(), q)));
}

SymMat3 rotate_from(const SymMat3& a, const Mat3& q) {
  return SymMat3::from_dense(matmul(q, matmul(a.dense(), transpose(q))));
}

Mat3 rotation_from_quaternion(double w, double x, double y, double z) {
  double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n; x /= n; y /= n; z /= n;
  Mat3 r{};
  r(0, 0) = 1 - 2 * (y * y + z * z);
  r(0, 1) = 2 * (x * y - w * z);
  r(0, 2) = 2 * (x * z + w * y);
  r(1, 0) = 2 * (x * y + w * z);
  r(1, 1) = 1 - 2 * (x * x + z * z);
  r(1, 2) = 2 * (y * z - w * x);
  r(2, 0) = 2 * (x * z - w * y);
  r(2, 1) = 2 * (y * z + w * x);
  r(2, 2) = 1 - 2 * (x * x + y * y);
  return r;
}

namespace {

double recon_error(const SymMat3& a, const Vec3& lambda, const Mat3& q) {
  Mat3 lam{};
  lam(0, 0) = lambda[0];
  lam(1, 1) = lambda[1];
  lam(2, 2) = lambda[2];
  Mat3 rec = matmul(q, matmul(lam, transpose(q)));
  double e = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double d = rec(i, j) - a(i, j);
      e += d * d;
    }
  return std::sqrt(e);
}

void sort_descending(Vec3& lambda, Mat3& q) {
  int order[3] = {0, 1, 2};
  std::sort(order, order + 3,
            [&](int i, int j) { return lambda[i] > lambda[j]; });
  Vec3 l2 = {lambda[order[0]], lambda[order[1]], lambda[order[2]]};
  Mat3 q2{};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) q2(i, j) = q(i, order[j]);
  lambda = l2;
  q = q2;
}

// Cyclic Jacobi rotations; robust for any symmetric input.
void jacobi_eigen(const SymMat3& a, Vec3& lambda, Mat3& q) {
  Mat3 m = a.dense();
  q = Mat3::identity();
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = std::abs(m(0, 1)) + std::abs(m(0, 2)) + std::abs(m(1, 2));
    double diag = std::abs(m(0, 0)) + std::abs(m(1, 1)) + std::abs(m(2, 2));
    if (off <= 1e-17 * (1 + diag)) break;
    for (int p = 0; p < 2; ++p)
      for (int r = p + 1; r < 3; ++r) {
        if (m(p, r) == 0) continue;
        double theta = (m(r, r) - m(p, p)) / (2 * m(p, r));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1);
        double s = t * c;
        for (int k = 0; k < 3; ++k) {
          double mkp = m(k, p), mkr = m(k, r);
          m(k, p) = c * mkp - s * mkr;
          m(k, r) = s * mkp + c * mkr;
        }
        for (int k = 0; k < 3; ++k) {
          double mpk = m(p, k), mrk = m(r, k);
          m(p, k) = c * mpk - s * mrk;
          m(r, k) = s * mpk + c * mrk;
        }
        for (int k = 0; k < 3; ++k) {
          double qkp = q(k, p), qkr = q(k, r);
          q(k, p) = c * qkp - s * qkr;
          q(k, r) = s * qkp + c * qkr;
        }
      }
  }
  lambda = {m(0, 0), m(1, 1), m(2, 2)};
  sort_descending(lambda, q);
}

Vec3 normalized_or(const Vec3& v, const Vec3& fallback) {
  double n = norm(v);
  if (n < 1e-300) return fallback;
  return (1.0 / n) * v;
}

// Eigenvector for a known eigenvalue: largest cross product of two rows
// of A - lambda I.
Vec3 eigvec_for(const SymMat3& a, double lambda) {
  Vec3 r0 = {a.a11 - lambda, a.a12, a.a13};
  Vec3 r1 = {a.a12, a.a22 - lambda, a.a23};
  Vec3 r2 = {a.a13, a.a23, a.a33 - lambda};
  Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
  double n01 = norm2(c01), n02 = norm2(c02), n12 = norm2(c12);
  Vec3 best = c01;
  double nb = n01;
  if (n02 > nb) { best = c02; nb = n02; }
  if (n12 > nb) { best = c12; nb = n12; }
  return normalized_or(best, {1, 0, 0});
}

}  // namespace

EigenTriple eigen_sorted(const SymMat3& a) {
  EigenTriple out;
  out.sig = sigma_all(a);
  out.used_fallback = false;

  double scale = 1 + a.frob();
  double q0 = a.trace() / 3.0;
  double p1 = a.a12 * a.a12 + a.a13 * a.a13 + a.a23 * a.a23;
  double p2 = (a.a11 - q0) * (a.a11 - q0) + (a.a22 - q0) * (a.a22 - q0) +
              (a.a33 - q0) * (a.a33 - q0) + 2 * p1;

  if (p2 <= 1e-28 * scale * scale) {
    // numerically a multiple of the identity
    out.lambda = {q0, q0, q0};
    out.q = Mat3::identity();
    return out;
  }

  double p = std::sqrt(p2 / 6.0);
  SymMat3 b = (a - SymMat3::diag(q0, q0, q0)) * (1.0 / p);
  double detb = sigma_all(b).s3;
  double r = std::clamp(detb / 2.0, -1.0, 1.0);
  double phi = std::acos(r) / 3.0;

  Vec3 lambda;
  lambda[0] = q0 + 2 * p * std::cos(phi);
  lambda[2] = q0 + 2 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  lambda[1] = 3 * q0 - lambda[0] - lambda[2];

  // Eigenvectors from the two extreme eigenvalues, middle by orthogonality.
  Vec3 v0 = eigvec_for(a, lambda[0]);
  Vec3 v2 = eigvec_for(a, lambda[2]);
  v2 = normalized_or(v2 - dot(v2, v0) * v0, {0, 0, 1});
  Vec3 v1 = cross(v2, v0);
  Mat3 q{};
  for (int i = 0; i < 3; ++i) {
    q(i, 0) = v0[i];
    q(i, 1) = v1[i];
    q(i, 2) = v2[i];
  }
  sort_descending(lambda, q);

  // The analytic discriminant degenerates at eigenvalue collisions; fall
  // back to Jacobi when it is tiny or the factorization check fails.
  double disc_rel = std::abs(1 - r * r);
  if (disc_rel < 1e-13 || recon_error(a, lambda, q) > 1e-13 * scale) {
    jacobi_eigen(a, lambda, q);
    out.used_fallback = true;
  }

  out.lambda = lambda;
  out.q = q;
  return out;
}

ConeReport in_gamma2(const SymMat3& a, double tau) {
  Sigmas s = sigma_all(a);
  double sc = 1 + a.frob();
  ConeReport rep;
  rep.sigma1_excess = s.s1 / sc - tau;
  rep.sigma2_excess = s.s2 / (sc * sc) - tau;
  rep.margin = std::min(rep.sigma1_excess, rep.sigma2_excess);
  rep.inside = rep.margin > 0;
  rep.newton_maclaurin = s.s1 * s.s2 - 9 * s.s3;
  return rep;
}

double minor_sigma1(const Vec3& lambda, int k, int p) {
  if (k == p) throw std::domain_error("minor_sigma1: indices must differ");
  if (k < 0 || k > 2 || p < 0 || p > 2)
    throw std::domain_error("minor_sigma1: index out of range");
  return lambda[0] + lambda[1] + lambda[2] - lambda[k] - lambda[p];
}

}  // namespace s2l
