#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "sigma2lab/jets.hpp"

namespace s2l {

// Scalar field on a uniform lattice over the cube [a,b]^3, n nodes per axis,
// x fastest: value(i,j,k) = v[i + n*(j + n*k)].
struct GridField {
  double a = -1, b = 1;
  int n = 17;
  std::vector<double> v;

  GridField() = default;
  GridField(double a_, double b_, int n_)
      : a(a_), b(b_), n(n_), v(size_t(n_) * n_ * n_, 0.0) {}

  double h() const { return (b - a) / (n - 1); }
  double coord(int i) const { return a + i * h(); }
  Vec3 point(int i, int j, int k) const {
    return {coord(i), coord(j), coord(k)};
  }
  size_t idx(int i, int j, int k) const {
    return size_t(i) + size_t(n) * (size_t(j) + size_t(n) * k);
  }
  double& at(int i, int j, int k) { return v[idx(i, j, k)]; }
  double at(int i, int j, int k) const { return v[idx(i, j, k)]; }
  // true when (i,j,k) is at least `margin` cells away from every face
  bool interior(int i, int j, int k, int margin = 1) const {
    return i >= margin && j >= margin && k >= margin && i < n - margin &&
           j < n - margin && k < n - margin;
  }
  bool boundary(int i, int j, int k) const { return !interior(i, j, k, 1); }
};

GridField sample_field(const std::function<double(const Vec3&)>& fn, double a,
                       double b, int n);

// Overwrites the outer node layer with g.
void apply_boundary(GridField& u, const std::function<double(const Vec3&)>& g);

// Centered second-order differences: gradient, Hessian (7-point axis +
// 4-point cross stencils) and all third derivatives. Pure third derivative
// needs a 2-cell margin. No fourth derivatives (d4u left empty).
Jet3 jet_at(const GridField& u, int i, int j, int k);

// Gradient + Hessian only (1-cell margin); cheaper inner loop for the solver
// and quadrature passes.
void jet2_at(const GridField& u, int i, int j, int k, Vec3& du, SymMat3& d2u);

// Bit-exact file format (documented in docs/grid-format.md):
//   line 1:  "s2lgrid 1 <n> <a-hexfloat> <b-hexfloat>\n"
//   payload: n^3 little-endian IEEE-754 doubles, x fastest.
void save_grid(const GridField& u, const std::filesystem::path& path);
GridField load_grid(const std::filesystem::path& path);

}  // namespace s2l
