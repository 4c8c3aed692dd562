#include <doctest.h>

#include "sigma2lab/pointwise.hpp"
#include "sigma2lab/rng.hpp"

using namespace s2l;

TEST_SUITE("pointwise") {

TEST_CASE("closed-form values at the isotropic point") {
  // 2x2 form at lambda = (1,1,1), eps = 2/5: diag 4 - 1.2, offdiag 1 - 1.2
  CHECK(claim1_min_eig({1, 1, 1}, 0.4) == doctest::Approx(2.6).epsilon(1e-15));
  // 24 * 24 - 6^2
  CHECK(claim2_gap({1, 1, 1}, 0.05) == doctest::Approx(540.0).epsilon(1e-15));
}

TEST_CASE("homogeneity in lambda") {
  CounterRng rng{17};
  for (uint64_t i = 0; i < 100; ++i) {
    Vec3 l = {rng.uniform(i, 0, 0.3, 2), rng.uniform(i, 1, 0.2, 1),
              rng.uniform(i, 2, -0.3, 0.5)};
    std::sort(l.begin(), l.end(), std::greater<double>());
    Sigmas s = sigma_from_lambda(l);
    if (!(s.s1 > 0 && s.s2 > 0)) continue;
    Vec3 l2 = 2.0 * l;
    CHECK(claim1_min_eig(l2, 0.3) ==
          doctest::Approx(2.0 * claim1_min_eig(l, 0.3)).epsilon(1e-12));
    CHECK(claim2_gap(l2, 0.05) ==
          doctest::Approx(16.0 * claim2_gap(l, 0.05)).epsilon(1e-12));
  }
}

TEST_CASE("cone ratios at hand-checked points") {
  Lemma2Ratios r = lemma2_ratios({2, 2, 2});
  CHECK(r.r1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.r2 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.r3 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  r = lemma2_ratios({1, 1, -0.4});
  CHECK(r.r1 == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.r2 == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(r.r3 == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("product and gram identities vanish") {
  CounterRng rng{23};
  for (uint64_t i = 0; i < 300; ++i) {
    Vec3 l = {rng.uniform(i, 0, -3, 3), rng.uniform(i, 1, -3, 3),
              rng.uniform(i, 2, -3, 3)};
    std::sort(l.begin(), l.end(), std::greater<double>());
    double s = 1.0 + norm(l);
    CHECK(std::fabs(product_identity_residual(l)) <= 1e-13 * s * s * s);
  }
  SymMat3 a{1.3, 1.0, 0.5, 0.2, -0.1, 0.15};
  CHECK(gram_identity_residual(a) <= 1e-14);
}

TEST_CASE("sample region rejects points off the cone") {
  SampleRegion reg;
  CounterRng rng{5};
  int accepted = 0;
  for (uint64_t i = 0; i < 2000; ++i) {
    Vec3 l;
    if (!reg.draw(rng, i, l)) continue;
    ++accepted;
    REQUIRE(reg.feasible(l));
    Sigmas s = sigma_from_lambda(l);
    CHECK(s.s1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.s2 > 0);
    CHECK(l[0] >= l[1]);
    CHECK(l[1] >= l[2]);
  }
  CHECK(accepted > 0);
}

TEST_CASE("infimum search stays nonnegative at admissible parameters") {
  InfimumReport rep =
      infimum_search({Quantity::Claim1, 0.4}, {}, 20000, 12345, -1e-10, 2);
  double scale = 1.0 + norm(rep.argmin);
  CHECK(rep.value >= -1e-10 * scale);
  CHECK(!rep.violation);
  CHECK(rep.samples_accepted > 0);
  CHECK(!rep.refinement.empty());

  rep = infimum_search({Quantity::Claim2, 0.05}, {}, 20000, 12345, 0.0, 2);
  double s = 1.0 + norm(rep.argmin);
  CHECK(rep.value >= -1e-8 * s * s * s * s);
}

TEST_CASE("inflated eps breaks the concavity form near the diagonal") {
  SampleRegion box;
  box.normalized = false;
  box.box_lo = 0.75;
  box.box_hi = 1.25;
  InfimumReport rep =
      infimum_search({Quantity::Claim1, 0.9}, box, 20000, 12345, -0.3, 2);
  CHECK(rep.value <= -0.3);
  CHECK(rep.violation);
  // a direct witness: min eigenvalue at the diagonal point is
  // t * (claim1 at ones) = -0.4 t
  CHECK(claim1_min_eig({1, 1, 1}, 0.9) == doctest::Approx(-0.4).epsilon(1e-14));
}

TEST_CASE("worker count does not change the search result") {
  InfimumReport a =
      infimum_search({Quantity::Claim1, 0.4}, {}, 20000, 99, -1e-10, 1);
  InfimumReport b =
      infimum_search({Quantity::Claim1, 0.4}, {}, 20000, 99, -1e-10, 7);
  CHECK(a.value == b.value);
  CHECK(a.argmin[0] == b.argmin[0]);
  CHECK(a.argmin[1] == b.argmin[1]);
  CHECK(a.argmin[2] == b.argmin[2]);
}

TEST_CASE("cone constants land at the analytic infima") {
  ConeConstants cc = estimate_cone_constants(50000, 12345, {}, 2);
  // c1 = 2/3, attained at the isotropic direction
  CHECK(cc.c1 == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  // c2 = 1/3, approached along (1, 1, t) as t -> -1/2
  CHECK(cc.c2 >= 1.0 / 3.0 - 1e-12);
  CHECK(cc.c2 <= 1.0 / 3.0 + 0.01);

  // the boundary family pins c2 from above
  double best = 1e300;
  for (int j = 1; j <= 7; ++j) {
    Lemma2Ratios r = lemma2_ratios({1.0, 1.0, -0.5 + std::pow(10.0, -j)});
    best = std::min(best, std::min(r.r2, r.r3));
  }
  CHECK(best <= 1.0 / 3.0 + 1e-3);
  CHECK(best >= 1.0 / 3.0);
}

}  // TEST_SUITE
