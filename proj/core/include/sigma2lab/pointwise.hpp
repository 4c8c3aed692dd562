#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigma2lab/rng.hpp"
#include "sigma2lab/symmat3.hpp"

namespace s2l {

// Smallest eigenvalue of the 2x2 concavity form behind the first claim:
//   [ s2^11 + s2^22 - eps*s1      lambda1 - eps*s1          ]
//   [ lambda1 - eps*s1            s2^11 + s2^33 - eps*s1    ]
// lambda must be descending. Scales linearly in lambda.
double claim1_min_eig(const Vec3& lambda, double eps);

// Determinant gap of the second claim's product inequality:
//   (2(s2^11+s2^22)s1 - (1+d)(l1-l2)^2) * (2(s2^11+s2^33)s1 - (1+d)(l1-l3)^2)
//   - (2 l1 s1 - (1+d)(l1-l2)(l1-l3))^2
// Scales like t^4 in lambda.
double claim2_gap(const Vec3& lambda, double delta);

struct Lemma2Ratios {
  double r1;  // s2^11 * lambda1 / sigma2
  double r2;  // s2^22 / sigma1
  double r3;  // s2^33 / sigma1
};

// The three cone-controlled ratios; requires ordered lambda in Gamma_2.
Lemma2Ratios lemma2_ratios(const Vec3& lambda);

// (s1*s2 - s3) - (s1-l1)(s1-l2)(s1-l3); identically zero.
double product_identity_residual(const Vec3& lambda);

// Max absolute entry of (f*s1 - s3) I - f * sigma2_grad(A) - (s1 A^2 - A^3)
// with f = sigma2(A); identically zero. Entries are O(|A|^3), so compare
// against (1 + |A|)^3.
double gram_identity_residual(const SymMat3& a);

// Sampling domain for the searches. Normalized mode draws (l3, l2) on the
// sigma1 = 1 slice with l1 = 1 - l2 - l3; box mode draws all three
// coordinates in [box_lo, box_hi] and sorts them. Both modes reject
// candidates outside the ordered Gamma_2 cone.
struct SampleRegion {
  bool normalized = true;
  double l3_min = -5.0;
  double l3_max = 1.0 / 3.0;
  double l2_max = 1.0;
  double box_lo = 0.0;
  double box_hi = 0.0;

  // Returns false when the draw is rejected.
  bool draw(const CounterRng& rng, uint64_t index, Vec3& lambda) const;
  bool grid_point(uint64_t flat, uint64_t per_axis, Vec3& lambda) const;
  bool feasible(const Vec3& lambda) const;
};

enum class Quantity { Claim1, Claim2, Lemma2R1, Lemma2R23, ClaRatio };

struct QuantitySpec {
  Quantity kind = Quantity::Claim1;
  double param = 0;  // eps for Claim1, delta for Claim2
};

struct RefinementStep {
  double step;
  double value;
};

struct InfimumReport {
  double value = 0;
  Vec3 argmin{};
  // auxiliary sample data (direction pair for the cla quantity)
  std::array<double, 6> aux{};
  bool has_aux = false;
  uint64_t samples_drawn = 0;
  uint64_t samples_accepted = 0;
  double grid_spacing = 0;  // densest grid spacing used in the pass
  std::vector<RefinementStep> refinement;
  bool violation = false;
  double threshold = 0;  // violation means value < threshold
};

// Grid pass + seeded uniform pass + pattern-search refinement of the best
// candidates. Deterministic for fixed (region, budget, seed, workers is
// irrelevant to the result).
InfimumReport infimum_search(const QuantitySpec& q, const SampleRegion& region,
                             uint64_t budget, uint64_t seed,
                             double violation_threshold = 0.0,
                             int workers = 0);

struct ConeConstants {
  double c1 = 0;  // inf of r1
  double c2 = 0;  // inf of min(r2, r3)
  Vec3 arg1{}, arg2{};
  uint64_t budget = 0;
  uint64_t seed = 0;
};

ConeConstants estimate_cone_constants(uint64_t budget, uint64_t seed,
                                      const SampleRegion& region = {},
                                      int workers = 0);

}  // namespace s2l
