#include <doctest.h>

#include <cmath>

#include "sigma2lab/calculus.hpp"
#include "sigma2lab/jets.hpp"

using namespace s2l;

namespace {
std::vector<Vec3> probe_points() {
  return {{0.3, -0.2, 0.4}, {0.5, 0.4, 0.3},   {-0.6, 0.1, -0.2},
          {0.0, 0.7, -0.5}, {-0.3, -0.3, 0.8}, {0.25, 0.0, -0.75}};
}
}  // namespace

TEST_SUITE("calculus") {

TEST_CASE("derivative tensor indexing round trips") {
  Deriv3 t;
  int count = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = j; k < 3; ++k) t.set(i, j, k, ++count);
  // symmetric access: any permutation reads the same slot
  CHECK(t(2, 1, 0) == t(0, 1, 2));
  CHECK(t(1, 0, 0) == t(0, 0, 1));
  Deriv4 q;
  q.set(0, 1, 2, 2, 4.5);
  CHECK(q(2, 2, 1, 0) == 4.5);
  CHECK(q(2, 0, 2, 1) == 4.5);
}

TEST_CASE("third order rotation matches the direct triple sum") {
  Deriv3 t;
  t.set(0, 0, 0, 1.0);
  t.set(0, 1, 2, -0.5);
  t.set(1, 1, 2, 0.25);
  Mat3 q = rotation_from_quaternion(0.9, 0.2, -0.3, 0.1);
  Deriv3 r = rotate_into(t, q);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = j; k < 3; ++k) {
        double ref = 0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
              ref += t(a, b, c) * q(a, i) * q(b, j) * q(c, k);
        CHECK(r(i, j, k) == doctest::Approx(ref).epsilon(1e-13));
      }
}

TEST_CASE("catalog solutions satisfy their equations") {
  for (const auto& s : standard_catalog())
    for (const auto& x : probe_points())
      CHECK(std::fabs(mms_residual(s, x)) <= 1e-12);
}

TEST_CASE("rhs evaluation positivity and capability guard") {
  auto cat = standard_catalog();
  for (const auto& s : cat)
    for (const auto& x : probe_points()) {
      Jet3 j = s.jet(x);
      CHECK(eval_rhs(s.rhs, j).value > 0);
    }
  // finite-difference style jet: no fourth derivatives
  Jet3 j = cat.front().jet({0.1, 0.2, 0.3});
  j.d4u.reset();
  RhsEval e = eval_rhs(cat.front().rhs, j);
  CHECK_NOTHROW((void)lemma1_r1(j, e));
  CHECK_THROWS_AS((void)lemma1_residuals(j, e), CapabilityError);
  CHECK_THROWS_AS((void)logb_residual(j, e), CapabilityError);
}

TEST_CASE("differentiated equation residuals vanish on analytic jets") {
  for (const auto& s : standard_catalog())
    for (const auto& x : probe_points()) {
      Jet3 j = s.jet(x);
      Lemma1Residuals r = lemma1_residuals(j, eval_rhs(s.rhs, j));
      for (int d = 0; d < 3; ++d) {
        CHECK(std::fabs(r.r1[d]) <= 1e-11);
        CHECK(std::fabs(r.r2[d]) <= 1e-11);
      }
    }
}

TEST_CASE("total derivatives of f along the solution, by differences") {
  auto cat = standard_catalog();
  const ManufacturedSolution* trig = nullptr;
  for (const auto& s : cat)
    if (s.name == "trig-pert") trig = &s;
  REQUIRE(trig != nullptr);
  auto F = [&](const Vec3& x) {
    Jet3 j = trig->jet(x);
    return trig->rhs.eval(x, j.u, j.du).value;
  };
  double h = 1e-5;
  for (const auto& x : probe_points()) {
    Jet3 j = trig->jet(x);
    Vec3 g = total_gradient(eval_rhs(trig->rhs, j), j);
    for (int d = 0; d < 3; ++d) {
      Vec3 xp = x, xm = x;
      xp[d] += h;
      xm[d] -= h;
      CHECK(g[d] == doctest::Approx((F(xp) - F(xm)) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("eigenframe split of the weight operator") {
  auto cat = standard_catalog();
  for (const auto& s : cat)
    for (const auto& x : probe_points()) {
      Jet3 j = s.jet(x);
      VParts v = v_decomposition(j, eval_rhs(s.rhs, j), 1e-6);
      if (v.skipped) {
        CHECK(v.separation <= 1e-6);
        continue;
      }
      // the mixed third-derivative coefficient is wrong by a factor of two
      // in one direction of the split; any coefficient slip shows up here
      // far above the tolerance
      CHECK(v.mismatch <= 1e-9 * (1.0 + std::fabs(v.direct)));
      CHECK(v.separation > 1e-6);
    }
  // isotropic quadratic: fully degenerate spectrum must be skipped
  const ManufacturedSolution& iso = cat.front();
  Jet3 j = iso.jet({0.2, 0.1, -0.3});
  VParts v = v_decomposition(j, eval_rhs(iso.rhs, j), 1e-6);
  CHECK(v.skipped);
  CHECK(v.direct == v.direct);  // direct value still present
}

TEST_CASE("concavity margin is nonnegative on the catalog") {
  for (const auto& s : standard_catalog())
    for (const auto& x : probe_points()) {
      Jet3 j = s.jet(x);
      CHECK(concavity_margin(j, eval_rhs(s.rhs, j)) >= -1e-10);
    }
}

TEST_CASE("weight jet gradient against differences") {
  auto cat = standard_catalog();
  const ManufacturedSolution* trig = nullptr;
  for (const auto& s : cat)
    if (s.name == "trig-pert") trig = &s;
  auto N = [&](const Vec3& x) {
    Jet3 j = trig->jet(x);
    return weight_jet(j, eval_rhs(trig->rhs, j), false).value;
  };
  double h = 1e-5;
  for (const auto& x : probe_points()) {
    Jet3 j = trig->jet(x);
    WeightJet w = weight_jet(j, eval_rhs(trig->rhs, j), true);
    CHECK(w.value > 0);
    CHECK(w.has_hess);
    for (int d = 0; d < 3; ++d) {
      Vec3 xp = x, xm = x;
      xp[d] += h;
      xm[d] -= h;
      CHECK(w.grad[d] ==
            doctest::Approx((N(xp) - N(xm)) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("coupled and rescaled variants stay exact") {
  auto cat = standard_catalog();
  const ManufacturedSolution* trig = nullptr;
  for (const auto& s : cat)
    if (s.name == "trig-pert") trig = &s;
  ManufacturedSolution sc = couple(*trig, 0.3, {0.1, -0.2, 0.05});
  ManufacturedSolution sr = rescale(*trig, 0.5);
  for (const auto& x : probe_points()) {
    CHECK(std::fabs(mms_residual(sc, x)) <= 1e-12);
    CHECK(std::fabs(mms_residual(sr, x)) <= 1e-12);
    Jet3 j = sc.jet(x);
    RhsEval e = eval_rhs(sc.rhs, j);
    CHECK(e.fu == doctest::Approx(0.3));
    CHECK(e.fp[1] == doctest::Approx(-0.2));
    // the (u, p) coupling must cancel in the differentiated equation too
    Vec3 r1 = lemma1_r1(j, e);
    for (int d = 0; d < 3; ++d) CHECK(std::fabs(r1[d]) <= 1e-11);
  }
}

TEST_CASE("admissibility scan accepts the catalog and rejects a fraud") {
  auto cat = standard_catalog();
  AdmissibilityReport rep =
      check_admissible(cat.front(), {-1, -1, -1}, {1, 1, 1}, 5);
  CHECK(rep.ok);
  CHECK(rep.min_margin > 0);
  CHECK(rep.max_residual <= 1e-12);

  // break the rhs so the scan must flag the residual
  ManufacturedSolution bad = cat.front();
  bad.rhs.eval = [](const Vec3&, double, const Vec3&) {
    RhsEval e;
    e.value = 2.9;
    return e;
  };
  AdmissibilityReport rep2 =
      check_admissible(bad, {-1, -1, -1}, {1, 1, 1}, 5);
  CHECK(rep2.max_residual > 0.05);
}

}  // TEST_SUITE
