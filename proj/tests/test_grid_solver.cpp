#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sigma2lab/grid.hpp"
#include "sigma2lab/solver.hpp"

using namespace s2l;

namespace {
ManufacturedSolution catalog_entry(const std::string& name) {
  for (auto& s : standard_catalog())
    if (s.name == name) return s;
  throw std::logic_error("missing catalog entry " + name);
}
}  // namespace

TEST_SUITE("solver") {

TEST_CASE("finite difference jets are exact on cubics") {
  auto poly = [](const Vec3& x) {
    return x[0] * x[0] * x[0] + 2 * x[0] * x[1] * x[2] - x[1] * x[1] +
           0.5 * x[2];
  };
  GridField u = sample_field(poly, -1, 1, 9);
  double h = u.h();
  Jet3 j = jet_at(u, 4, 4, 4);  // the origin
  CHECK(j.u == doctest::Approx(0.0).epsilon(1e-14));
  // the centered first difference of a cubic carries exactly its
  // (h^2/6) u_xxx term; everything above vanishes
  CHECK(j.du[0] == doctest::Approx(h * h).epsilon(1e-12));
  CHECK(j.du[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(j.d2u.a22 == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(j.d3u(0, 0, 0) == doctest::Approx(6.0).epsilon(1e-10));
  CHECK(j.d3u(0, 1, 2) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(!j.d4u.has_value());

  Vec3 du;
  SymMat3 d2;
  jet2_at(u, 3, 5, 4, du, d2);
  Jet3 full = jet_at(u, 3, 5, 4);
  CHECK(du[0] == full.du[0]);
  CHECK(d2.a13 == full.d2u.a13);
}

TEST_CASE("jet margins are enforced") {
  GridField u = sample_field([](const Vec3& x) { return norm2(x); }, -1, 1, 9);
  CHECK_THROWS_AS((void)jet_at(u, 1, 4, 4), std::domain_error);
  Vec3 du;
  SymMat3 d2;
  CHECK_THROWS_AS(jet2_at(u, 0, 4, 4, du, d2), std::domain_error);
}

TEST_CASE("grid files round trip bit for bit") {
  GridField u = sample_field(
      [](const Vec3& x) { return std::sin(3 * x[0]) + x[1] * x[2]; }, -1.25,
      0.75, 11);
  auto path = std::filesystem::temp_directory_path() / "s2l_unit.grid";
  save_grid(u, path);
  GridField v = load_grid(path);
  CHECK(v.n == u.n);
  CHECK(v.a == u.a);
  CHECK(v.b == u.b);
  CHECK(v.v == u.v);  // exact payload comparison
  std::filesystem::remove(path);
}

TEST_CASE("grid loader rejects malformed files") {
  auto dir = std::filesystem::temp_directory_path();
  auto bad = dir / "s2l_bad.grid";
  {
    std::ofstream f(bad, std::ios::binary);
    f << "wrongmagic 1 5 0x0p+0 0x1p+0\n";
  }
  CHECK_THROWS_AS((void)load_grid(bad), std::runtime_error);
  {
    std::ofstream f(bad, std::ios::binary);
    f << "s2lgrid 1 5 0x1p+0 0x0p+0\n";  // a >= b
  }
  CHECK_THROWS_AS((void)load_grid(bad), std::runtime_error);
  {
    GridField u(0, 1, 5);
    save_grid(u, bad);
    std::ofstream f(bad, std::ios::binary | std::ios::app);
    f << "x";  // trailing byte
  }
  CHECK_THROWS_AS((void)load_grid(bad), std::runtime_error);
  std::filesystem::remove(bad);
}

TEST_CASE("discrete residual and cone margin on an exact field") {
  ManufacturedSolution s = catalog_entry("quad-aniso");
  GridField u = sample_field([&](const Vec3& x) { return s.jet(x).u; }, -1, 1,
                             9);
  CHECK(residual_norm(u, s.rhs) <= 1e-12);
  CHECK(cone_margin(u, 1e-8) > 0);
}

TEST_CASE("newton recovers the anisotropic quadratic") {
  ManufacturedSolution s = catalog_entry("quad-aniso");
  auto g = [&](const Vec3& x) { return s.jet(x).u; };
  SolveParams sp;
  Jet3 j0 = s.jet({0, 0, 0});
  sp.init_a = std::sqrt(s.rhs.eval(j0.x, j0.u, j0.du).value / 3.0);
  auto [u, stats] = solve_dirichlet(s.rhs, g, -1, 1, 9, sp);
  CHECK(stats.converged);
  CHECK(stats.iterations <= 3);
  double err = 0;
  for (int k = 0; k < u.n; ++k)
    for (int jy = 0; jy < u.n; ++jy)
      for (int i = 0; i < u.n; ++i)
        err = std::max(err,
                       std::fabs(u.at(i, jy, k) - s.jet(u.point(i, jy, k)).u));
  CHECK(err <= 1e-10);
  // every accepted iterate stayed inside the cone
  for (double m : stats.cone_margin_history) CHECK(m > 0);
}

TEST_CASE("harmonic cubic data is discretely exact") {
  ManufacturedSolution s = catalog_entry("cubic-pert");
  auto g = [&](const Vec3& x) { return s.jet(x).u; };
  auto [u, stats] = solve_dirichlet(s.rhs, g, -1, 1, 9, {});
  double err = 0;
  for (int k = 0; k < u.n; ++k)
    for (int jy = 0; jy < u.n; ++jy)
      for (int i = 0; i < u.n; ++i)
        err = std::max(err,
                       std::fabs(u.at(i, jy, k) - s.jet(u.point(i, jy, k)).u));
  // centered stencils are exact on cubics, so the solve ends at roundoff
  CHECK(err <= 1e-9);
  CHECK(stats.iterations <= 1);
}

TEST_CASE("cone exit and non convergence are reported, not swallowed") {
  ManufacturedSolution s = catalog_entry("quad-aniso");
  auto g = [&](const Vec3& x) { return s.jet(x).u; };
  SolveParams flat;
  flat.init_a = 0.0;  // admissible_init collapses to the boundary lift only
  CHECK_THROWS_AS((void)solve_dirichlet(s.rhs, g, -1, 1, 9, flat), ConeExit);

  ManufacturedSolution t = catalog_entry("trig-pert");
  auto gt = [&](const Vec3& x) { return t.jet(x).u; };
  SolveParams starved;
  starved.max_iter = 0;
  CHECK_THROWS_AS((void)solve_dirichlet(t.rhs, gt, -1, 1, 9, starved),
                  NonConvergence);
}

TEST_CASE("convergence study flags discretely exact families") {
  ManufacturedSolution s = catalog_entry("cubic-axis");
  auto rows = convergence_study(s, {9, 17}, -1, 1, {});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].exact);
  CHECK(rows[1].exact);
  CHECK(rows[1].max_error <= 1e-9);
}

}  // TEST_SUITE
