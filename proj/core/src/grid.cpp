#include "sigma2lab/grid.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>

namespace s2l {

GridField sample_field(const std::function<double(const Vec3&)>& fn, double a,
                       double b, int n) {
  if (n < 2) throw std::invalid_argument("sample_field: n < 2");
  GridField u(a, b, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) u.at(i, j, k) = fn(u.point(i, j, k));
  return u;
}

void apply_boundary(GridField& u,
                    const std::function<double(const Vec3&)>& g) {
  int n = u.n;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (u.boundary(i, j, k)) u.at(i, j, k) = g(u.point(i, j, k));
}

namespace {

inline int off(int d, int axis, int which) {
  return axis == which ? d : 0;
}

}  // namespace

void jet2_at(const GridField& u, int i, int j, int k, Vec3& du,
             SymMat3& d2u) {
  if (!u.interior(i, j, k, 1))
    throw std::domain_error("jet2_at: needs a 1-cell interior margin");
  double h = u.h();
  auto val = [&](int di, int dj, int dk) {
    return u.at(i + di, j + dj, k + dk);
  };
  double c = val(0, 0, 0);
  for (int a = 0; a < 3; ++a) {
    double up = val(off(1, a, 0), off(1, a, 1), off(1, a, 2));
    double dn = val(off(-1, a, 0), off(-1, a, 1), off(-1, a, 2));
    du[a] = (up - dn) / (2 * h);
    d2u.set(a, a, (up - 2 * c + dn) / (h * h));
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      auto v2 = [&](int da, int db) {
        int d[3] = {0, 0, 0};
        d[a] = da;
        d[b] = db;
        return val(d[0], d[1], d[2]);
      };
      d2u.set(a, b,
              (v2(1, 1) + v2(-1, -1) - v2(1, -1) - v2(-1, 1)) / (4 * h * h));
    }
}

Jet3 jet_at(const GridField& u, int i, int j, int k) {
  if (!u.interior(i, j, k, 2))
    throw std::domain_error("jet_at: needs a 2-cell interior margin");
  Jet3 jet;
  jet.x = u.point(i, j, k);
  jet.u = u.at(i, j, k);
  jet2_at(u, i, j, k, jet.du, jet.d2u);
  double h = u.h();
  auto val = [&](int di, int dj, int dk) {
    return u.at(i + di, j + dj, k + dk);
  };
  // u_aaa: (u(+2) - 2u(+1) + 2u(-1) - u(-2)) / (2h^3)
  for (int a = 0; a < 3; ++a) {
    auto v1 = [&](int d) {
      return val(off(d, a, 0), off(d, a, 1), off(d, a, 2));
    };
    jet.d3u.set(a, a, a,
                (v1(2) - 2 * v1(1) + 2 * v1(-1) - v1(-2)) / (2 * h * h * h));
  }
  // u_aab (a != b): centered difference in b of the aa second difference
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      auto v2 = [&](int da, int db) {
        int d[3] = {0, 0, 0};
        d[a] = da;
        d[b] += db;
        return val(d[0], d[1], d[2]);
      };
      double v = (v2(1, 1) - 2 * v2(0, 1) + v2(-1, 1) - v2(1, -1) +
                  2 * v2(0, -1) - v2(-1, -1)) /
                 (2 * h * h * h);
      jet.d3u.set(a, a, b, v);
    }
  // u_123: all three centered first differences
  {
    double s = 0;
    for (int da = -1; da <= 1; da += 2)
      for (int db = -1; db <= 1; db += 2)
        for (int dc = -1; dc <= 1; dc += 2)
          s += da * db * dc * val(da, db, dc);
    jet.d3u.set(0, 1, 2, s / (8 * h * h * h));
  }
  return jet;
}

void save_grid(const GridField& u, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw std::runtime_error("save_grid: cannot open " + path.string());
  std::fprintf(f, "s2lgrid 1 %d %a %a\n", u.n, u.a, u.b);
  static_assert(std::endian::native == std::endian::little,
                "grid format is little-endian");
  size_t total = u.v.size();
  if (std::fwrite(u.v.data(), sizeof(double), total, f) != total) {
    std::fclose(f);
    throw std::runtime_error("save_grid: short write to " + path.string());
  }
  std::fclose(f);
}

GridField load_grid(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "rb");
  if (!f) throw std::runtime_error("load_grid: cannot open " + path.string());
  char magic[16] = {0};
  int version = 0, n = 0;
  double a = 0, b = 0;
  if (std::fscanf(f, "%15s %d %d %la %la", magic, &version, &n, &a, &b) != 5 ||
      std::string(magic) != "s2lgrid" || version != 1 || n < 2 || !(a < b)) {
    std::fclose(f);
    throw std::runtime_error("load_grid: bad header in " + path.string());
  }
  std::fgetc(f);  // consume the newline before the payload
  GridField u(a, b, n);
  if (std::fread(u.v.data(), sizeof(double), u.v.size(), f) != u.v.size()) {
    std::fclose(f);
    throw std::runtime_error("load_grid: short read from " + path.string());
  }
  if (std::fgetc(f) != EOF) {
    std::fclose(f);
    throw std::runtime_error("load_grid: trailing bytes in " + path.string());
  }
  std::fclose(f);
  return u;
}

}  // namespace s2l
