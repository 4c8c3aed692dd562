#include <doctest.h>

#include <cmath>

#include "sigma2lab/calculus.hpp"
#include "sigma2lab/graphgeom.hpp"
#include "sigma2lab/rng.hpp"

using namespace s2l;

namespace {
constexpr double kPi = 3.14159265358979323846;

ManufacturedSolution catalog_entry(const std::string& name) {
  for (auto& s : standard_catalog())
    if (s.name == name) return s;
  throw std::logic_error("missing catalog entry " + name);
}
}  // namespace

TEST_SUITE("graphgeom") {

TEST_CASE("gauge of the isotropic quadratic is 2|x - y0|") {
  ManufacturedSolution s = catalog_entry("quad-iso");
  Vec3 y0{0.2, -0.1, 0.3};
  Vec3 du0 = s.jet(y0).du;
  for (const Vec3& x : {Vec3{0.5, 0.1, -0.2}, Vec3{-0.4, 0.3, 0.0}}) {
    Jet3 j = s.jet(x);
    double r = graph_radius(j, eval_rhs(s.rhs, j), y0, du0);
    CHECK(r == doctest::Approx(2.0 * norm(x - y0)).epsilon(1e-14));
  }
}

TEST_CASE("weighted density matches sigma1 (f sigma1 - sigma3)") {
  ManufacturedSolution s = catalog_entry("quad-iso");
  Jet3 j = s.jet({0.1, 0.1, 0.1});
  // lambda = (1,1,1): sigma1 = 3, f = 3, sigma3 = 1 -> 3 * (9 - 1) = 24
  CHECK(weighted_density(j, eval_rhs(s.rhs, j)) ==
        doctest::Approx(24.0).epsilon(1e-14));

  // outside the cone the density is undefined by construction
  Jet3 bad = j;
  bad.d2u = SymMat3::diag(1, -2, 0.5);
  CHECK_THROWS_AS((void)weighted_density(bad, eval_rhs(s.rhs, j)),
                  std::domain_error);
}

TEST_CASE("quadratics saturate the gauge gradient comparison") {
  ManufacturedSolution s = catalog_entry("quad-aniso");
  CounterRng rng{31};
  for (uint64_t i = 0; i < 64; ++i) {
    Vec3 x, y;
    for (int d = 0; d < 3; ++d) {
      x[d] = rng.uniform(i, d, -1, 1);
      y[d] = rng.uniform(i, 3 + d, -1, 1);
    }
    Jet3 j = s.jet(x);
    CHECK(cla_ratio(j, eval_rhs(s.rhs, j), y, s.jet(y).du) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("eigenvalue chain at hand-checked cone points") {
  // lambda = (0.3, 0.3, -0.1): f = 0.03, N = 0.024
  LambdaChainReport r = lambda_chain({0.3, 0.3, -0.1});
  CHECK(r.m_lower == doctest::Approx(0.012).epsilon(1e-14));
  CHECK(std::fabs(r.identity) <= 1e-16);
  CHECK(r.ratio_lower == doctest::Approx(1.25).epsilon(1e-14));
  // the naive lower comparison -l2 l3 <= N fails here: ratio > 1
  CHECK(r.ratio_lower > 1.0);

  // lambda = (0.8, 0.5, -0.3): f = 0.01, N = 0.13
  r = lambda_chain({0.8, 0.5, -0.3});
  CHECK(r.m_lower == doctest::Approx(0.05).epsilon(1e-13));
  CHECK(r.m_upper == doctest::Approx(1.0625).epsilon(1e-13));
  CHECK(r.m_neg == doctest::Approx(0.082).epsilon(1e-13));
  CHECK(r.ratio_upper == doctest::Approx(40.0 / 13.0).epsilon(1e-14));
  // the naive upper comparison l1 l2 <= 3 N fails here: ratio > 3
  CHECK(r.ratio_upper > 3.0);
}

TEST_CASE("eigenvalue chain margins over cone samples") {
  CounterRng rng{13};
  for (uint64_t i = 0; i < 2000; ++i) {
    Vec3 l = {rng.uniform(i, 0, -1.5, 3), rng.uniform(i, 1, -1.5, 3),
              rng.uniform(i, 2, -1.5, 3)};
    std::sort(l.begin(), l.end(), std::greater<double>());
    Sigmas s = sigma_from_lambda(l);
    if (!(s.s1 > 0 && s.s2 > 0)) continue;
    LambdaChainReport r = lambda_chain(l);
    double sc = 1.0 + norm(l);
    sc = sc * sc * sc;
    CHECK(r.m_lower >= -1e-12 * sc);
    CHECK(r.m_upper >= -1e-12 * sc);
    CHECK(r.m_neg >= -1e-12 * sc);
    CHECK(std::fabs(r.identity) <= 1e-13 * sc);
  }
  Vec3 unordered{1.0, -2.0, 0.5};
  CHECK_THROWS_AS((void)lambda_chain(unordered), std::invalid_argument);
}

TEST_CASE("ball mass of the isotropic quadratic is 4 pi delta^3") {
  ManufacturedSolution s = catalog_entry("quad-iso");
  GridField u = sample_field([&](const Vec3& x) { return s.jet(x).u; }, -1, 1,
                             17);
  NodeIndex y0{8, 8, 8};
  double h = u.h();
  for (double cells : {4.0, 6.0, 8.0}) {
    double delta = cells * h;
    double mass = ball_mass(u, s.rhs, y0, delta, {});
    CHECK(std::fabs(mass / (4 * kPi * delta * delta * delta) - 1.0) <= 0.02);
  }
  // sharp indicator quadrature is visibly worse; the cell-fraction rule is
  // the default for a reason
  BallQuadParams sharp;
  sharp.mode = BallQuadParams::Mode::Sharp;
  MassProfile ps =
      monotonicity_profile(u, s.rhs, y0, {4 * h, 5 * h, 6 * h, 8 * h}, sharp);
  MassProfile pc =
      monotonicity_profile(u, s.rhs, y0, {4 * h, 5 * h, 6 * h, 8 * h}, {});
  CHECK(pc.c_emp <= 1.05);
  CHECK(ps.c_emp > pc.c_emp);
  BallQuadParams smooth;
  smooth.mode = BallQuadParams::Mode::Smoothed;
  MassProfile pm =
      monotonicity_profile(u, s.rhs, y0, {4 * h, 5 * h, 6 * h, 8 * h}, smooth);
  CHECK(pm.c_emp <= 1.15);
}

TEST_CASE("mean value ratio of the isotropic quadratic") {
  ManufacturedSolution s = catalog_entry("quad-iso");
  GridField u = sample_field([&](const Vec3& x) { return s.jet(x).u; }, -1, 1,
                             17);
  double v = mean_value_ratio(u, s.rhs, {8, 8, 8}, 4 * u.h(), {});
  CHECK(std::fabs(v / (3.0 / (32.0 * kPi)) - 1.0) <= 0.02);
}

TEST_CASE("profiles validate their inputs and respect the boundary") {
  ManufacturedSolution s = catalog_entry("quad-iso");
  GridField u = sample_field([&](const Vec3& x) { return s.jet(x).u; }, -1, 1,
                             17);
  NodeIndex y0{8, 8, 8};
  double h = u.h();
  const std::vector<double> decreasing = {6 * h, 4 * h};
  const BallQuadParams q{};
  NodeIndex near_face{2, 8, 8};
  CHECK_THROWS_AS((void)monotonicity_profile(u, s.rhs, y0, decreasing, q),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ball_mass(u, s.rhs, y0, 5.0, q), std::domain_error);
  CHECK_THROWS_AS((void)ball_mass(u, s.rhs, near_face, 6 * h, q),
                  std::domain_error);
}

}  // TEST_SUITE
