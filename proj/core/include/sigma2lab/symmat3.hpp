#pragma once

#include <array>
#include <cmath>

namespace s2l {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

// Dense 3x3 matrix, row major. Used for eigenvector frames and rotations.
struct Mat3 {
  double m[3][3];

  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }

  static Mat3 identity() {
    return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  }
  Vec3 col(int j) const { return {m[0][j], m[1][j], m[2][j]}; }
  Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }
};

Mat3 matmul(const Mat3& a, const Mat3& b);
Vec3 matvec(const Mat3& a, const Vec3& v);
Mat3 transpose(const Mat3& a);

// Symmetric 3x3 matrix stored as six entries.
struct SymMat3 {
  double a11 = 0, a22 = 0, a33 = 0, a12 = 0, a13 = 0, a23 = 0;

  double operator()(int i, int j) const;
  void set(int i, int j, double v);

  static SymMat3 diag(double d1, double d2, double d3) {
    return {d1, d2, d3, 0, 0, 0};
  }
  static SymMat3 identity() { return diag(1, 1, 1); }
  static SymMat3 from_dense(const Mat3& m) {
    return {m(0, 0), m(1, 1), m(2, 2), 0.5 * (m(0, 1) + m(1, 0)),
            0.5 * (m(0, 2) + m(2, 0)), 0.5 * (m(1, 2) + m(2, 1))};
  }

  Mat3 dense() const {
    return {{{a11, a12, a13}, {a12, a22, a23}, {a13, a23, a33}}};
  }

  double trace() const { return a11 + a22 + a33; }
  double frob() const {
    return std::sqrt(a11 * a11 + a22 * a22 + a33 * a33 +
                     2 * (a12 * a12 + a13 * a13 + a23 * a23));
  }

  SymMat3 operator+(const SymMat3& o) const {
    return {a11 + o.a11, a22 + o.a22, a33 + o.a33,
            a12 + o.a12, a13 + o.a13, a23 + o.a23};
  }
  SymMat3 operator-(const SymMat3& o) const {
    return {a11 - o.a11, a22 - o.a22, a33 - o.a33,
            a12 - o.a12, a13 - o.a13, a23 - o.a23};
  }
  SymMat3 operator*(double s) const {
    return {s * a11, s * a22, s * a33, s * a12, s * a13, s * a23};
  }
};

// full double contraction sum_ij a_ij b_ij
inline double inner(const SymMat3& a, const SymMat3& b) {
  return a.a11 * b.a11 + a.a22 * b.a22 + a.a33 * b.a33 +
         2 * (a.a12 * b.a12 + a.a13 * b.a13 + a.a23 * b.a23);
}

struct Sigmas {
  double s1 = 0, s2 = 0, s3 = 0;
};

// Elementary symmetric functions of the eigenvalues, from the entries.
Sigmas sigma_all(const SymMat3& a);
Sigmas sigma_from_lambda(const Vec3& lambda);

// d(sigma2)/d(a_ij) = sigma1 * I - A.
SymMat3 sigma2_gradient(const SymMat3& a);
// d(sigma3)/d(a_ij) = adjugate(A).
SymMat3 sigma3_gradient(const SymMat3& a);

// Directional derivatives along symmetric directions (frame free).
double dsigma1(const SymMat3& b);
double dsigma2(const SymMat3& a, const SymMat3& b);
double d2sigma2(const SymMat3& b, const SymMat3& c);
double dsigma3(const SymMat3& a, const SymMat3& b);
double d2sigma3(const SymMat3& a, const SymMat3& b, const SymMat3& c);

struct EigenTriple {
  Vec3 lambda;         // descending: lambda[0] >= lambda[1] >= lambda[2]
  Mat3 q;              // orthonormal columns, A = Q diag(lambda) Q^T
  Sigmas sig;          // computed from the matrix entries, not from lambda
  bool used_fallback;  // true when the iterative path was taken
};

// Eigen decomposition: closed-form trigonometric solve with a Jacobi
// fallback when the analytic discriminant is nearly zero or the
// reconstruction check fails.
EigenTriple eigen_sorted(const SymMat3& a);

// Q^T A Q and Q A Q^T.
SymMat3 rotate_into(const SymMat3& a, const Mat3& q);
SymMat3 rotate_from(const SymMat3& a, const Mat3& q);
// Rotation matrix from a (not necessarily unit) quaternion.
Mat3 rotation_from_quaternion(double w, double x, double y, double z);

inline constexpr double kConeTau = 1e-9;

struct ConeReport {
  bool inside = false;
  double margin = 0;            // min of the two normalized excesses
  double sigma1_excess = 0;     // sigma1/(1+|A|)   - tau
  double sigma2_excess = 0;     // sigma2/(1+|A|)^2 - tau
  double newton_maclaurin = 0;  // sigma1*sigma2 - 9*sigma3
};

// Membership in the Gamma_2 cone with a scale-relative margin.
ConeReport in_gamma2(const SymMat3& a, double tau = kConeTau);

// sigma1 of the triple with entries k and p removed; throws on k == p.
double minor_sigma1(const Vec3& lambda, int k, int p);

}  // namespace s2l
