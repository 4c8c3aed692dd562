#include "sigma2lab/pointwise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sigma2lab/parallel.hpp"

namespace s2l {

namespace {

void require_ordered(const Vec3& l) {
  if (!(l[0] >= l[1] && l[1] >= l[2]))
    throw std::domain_error("lambda must be sorted descending");
}

}  // namespace

double claim1_min_eig(const Vec3& l, double eps) {
  require_ordered(l);
  double s1 = l[0] + l[1] + l[2];
  double s11 = s1 - l[0], s22 = s1 - l[1], s33 = s1 - l[2];
  double a = s11 + s22 - eps * s1;
  double c = s11 + s33 - eps * s1;
  double b = l[0] - eps * s1;
  return 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

double claim2_gap(const Vec3& l, double delta) {
  require_ordered(l);
  double s1 = l[0] + l[1] + l[2];
  double s11 = s1 - l[0], s22 = s1 - l[1], s33 = s1 - l[2];
  double g12 = l[0] - l[1], g13 = l[0] - l[2];
  double a = 2 * (s11 + s22) * s1 - (1 + delta) * g12 * g12;
  double b = 2 * (s11 + s33) * s1 - (1 + delta) * g13 * g13;
  double c = 2 * l[0] * s1 - (1 + delta) * g12 * g13;
  return a * b - c * c;
}

Lemma2Ratios lemma2_ratios(const Vec3& l) {
  require_ordered(l);
  Sigmas s = sigma_from_lambda(l);
  if (s.s1 <= 0 || s.s2 <= 0)
    throw std::domain_error("lemma2_ratios: lambda outside Gamma_2");
  return {(s.s1 - l[0]) * l[0] / s.s2, (s.s1 - l[1]) / s.s1,
          (s.s1 - l[2]) / s.s1};
}

double product_identity_residual(const Vec3& l) {
  Sigmas s = sigma_from_lambda(l);
  double lhs = s.s1 * s.s2 - s.s3;
  double rhs = (s.s1 - l[0]) * (s.s1 - l[1]) * (s.s1 - l[2]);
  return lhs - rhs;
}

double gram_identity_residual(const SymMat3& a) {
  Sigmas s = sigma_all(a);
  double f = s.s2;
  Mat3 ad = a.dense();
  Mat3 a2 = matmul(ad, ad);
  Mat3 a3 = matmul(a2, ad);
  SymMat3 grad = sigma2_gradient(a);
  double worst = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double gram = s.s1 * a2(i, j) - a3(i, j);  // sigma2^{kl} a_ki a_lj
      double lhs = (i == j ? f * s.s1 - s.s3 : 0.0) - f * grad(i, j);
      worst = std::max(worst, std::abs(lhs - gram));
    }
  return worst;
}

bool SampleRegion::feasible(const Vec3& l) const {
  if (!(l[0] >= l[1] && l[1] >= l[2])) return false;
  Sigmas s = sigma_from_lambda(l);
  return s.s1 > 0 && s.s2 > 0;
}

bool SampleRegion::draw(const CounterRng& rng, uint64_t index,
                        Vec3& l) const {
  if (normalized) {
    double l3 = rng.uniform(index, 0, l3_min, l3_max);
    double l2 = rng.uniform(index, 1, l3, l2_max);
    l = {1.0 - l2 - l3, l2, l3};
  } else {
    l = {rng.uniform(index, 0, box_lo, box_hi),
         rng.uniform(index, 1, box_lo, box_hi),
         rng.uniform(index, 2, box_lo, box_hi)};
    std::sort(l.begin(), l.end(), std::greater<double>());
  }
  return feasible(l);
}

bool SampleRegion::grid_point(uint64_t flat, uint64_t per_axis,
                              Vec3& l) const {
  if (per_axis < 1) return false;
  auto coord = [&](uint64_t k, double lo, double hi) {
    return per_axis == 1 ? 0.5 * (lo + hi)
                         : lo + (hi - lo) * static_cast<double>(k) /
                                   static_cast<double>(per_axis - 1);
  };
  if (normalized) {
    uint64_t i = flat % per_axis, j = flat / per_axis;
    double l3 = coord(i, l3_min, l3_max);
    double l2 = coord(j, l3_min, l2_max);
    l = {1.0 - l2 - l3, l2, l3};
  } else {
    uint64_t i = flat % per_axis;
    uint64_t j = (flat / per_axis) % per_axis;
    uint64_t k = flat / (per_axis * per_axis);
    l = {coord(i, box_lo, box_hi), coord(j, box_lo, box_hi),
         coord(k, box_lo, box_hi)};
    std::sort(l.begin(), l.end(), std::greater<double>());
  }
  return feasible(l);
}

namespace {

struct Candidate {
  double value = 0;
  Vec3 lambda{};
  std::array<double, 6> aux{};
  uint64_t index = 0;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value < b.value;
  return a.index < b.index;
}

// Direction pair (x, p) on the unit sphere in R^6 for the cla quantity.
std::array<double, 6> draw_direction(const CounterRng& rng, uint64_t index) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::array<double, 6> d{};
  double n2 = 0;
  for (int k = 0; k < 6; ++k) {
    // Box-Muller from two counter draws per component
    // dims 0..2 are reserved for the lambda draw
    double u1 = std::max(rng.u01(index, 8 + 2 * k), 1e-300);
    double u2 = rng.u01(index, 9 + 2 * k);
    d[k] = std::sqrt(-2 * std::log(u1)) * std::cos(kTwoPi * u2);
    n2 += d[k] * d[k];
  }
  double n = std::sqrt(std::max(n2, 1e-300));
  for (auto& v : d) v /= n;
  return d;
}

// 1 - sigma2^{ii}(f x_i + lambda_i p_i)^2 / ((f s1 - s3)(f|x|^2 + |p|^2)),
// f = sigma2; nonnegative by coordinatewise Cauchy-Schwarz plus the Gram
// identity, approaching zero at the aligned direction.
double cla_quantity(const Vec3& l, const std::array<double, 6>& d) {
  Sigmas s = sigma_from_lambda(l);
  double f = s.s2;
  double denom_scalar = f * s.s1 - s.s3;
  double num = 0, den = 0;
  for (int i = 0; i < 3; ++i) {
    double x = d[i], p = d[3 + i];
    double w = f * x + l[i] * p;
    num += (s.s1 - l[i]) * w * w;
    den += f * x * x + p * p;
  }
  return 1.0 - num / (denom_scalar * den);
}

double eval_quantity(const QuantitySpec& q, const Vec3& l,
                     const std::array<double, 6>& aux) {
  switch (q.kind) {
    case Quantity::Claim1: return claim1_min_eig(l, q.param);
    case Quantity::Claim2: return claim2_gap(l, q.param);
    case Quantity::Lemma2R1: return lemma2_ratios(l).r1;
    case Quantity::Lemma2R23: {
      Lemma2Ratios r = lemma2_ratios(l);
      return std::min(r.r2, r.r3);
    }
    case Quantity::ClaRatio: return cla_quantity(l, aux);
  }
  return 0;
}

constexpr int kTopK = 16;

void keep_topk(std::vector<Candidate>& top, const Candidate& c) {
  top.push_back(c);
  std::sort(top.begin(), top.end(), better);
  if (top.size() > kTopK) top.resize(kTopK);
}

// Derivative-free pattern search over the region's free coordinates
// (min-eigenvalue objectives are nonsmooth at crossings).
Candidate pattern_search(const QuantitySpec& q, const SampleRegion& region,
                         Candidate start, double step0,
                         std::vector<RefinementStep>& trace) {
  Candidate best = start;
  if (step0 <= 0) return best;
  double step = step0;
  int guard = 0;
  while (step >= 1e-8 && guard++ < 400) {
    bool improved = false;
    Candidate round_best = best;
    auto consider = [&](const Vec3& l) {
      if (!region.feasible(l)) return;
      Candidate c{eval_quantity(q, l, best.aux), l, best.aux, best.index};
      if (better(c, round_best)) {
        round_best = c;
        improved = true;
      }
    };
    if (region.normalized) {
      for (int d = 0; d < 2; ++d)
        for (double sgn : {-1.0, 1.0}) {
          double l2 = best.lambda[1] + (d == 0 ? sgn * step : 0.0);
          double l3 = best.lambda[2] + (d == 1 ? sgn * step : 0.0);
          l3 = std::clamp(l3, region.l3_min, region.l3_max);
          l2 = std::clamp(l2, l3, region.l2_max);
          consider({1.0 - l2 - l3, l2, l3});
        }
    } else {
      for (int d = 0; d < 3; ++d)
        for (double sgn : {-1.0, 1.0}) {
          Vec3 l = best.lambda;
          l[d] = std::clamp(l[d] + sgn * step, region.box_lo, region.box_hi);
          std::sort(l.begin(), l.end(), std::greater<double>());
          consider(l);
        }
    }
    if (improved) {
      best = round_best;
    } else {
      step *= 0.5;
      trace.push_back({step, best.value});
    }
  }
  return best;
}

}  // namespace

InfimumReport infimum_search(const QuantitySpec& q, const SampleRegion& region,
                             uint64_t budget, uint64_t seed,
                             double violation_threshold, int workers) {
  if (budget < 1) throw std::invalid_argument("infimum_search: budget < 1");
  if (workers <= 0) workers = default_workers();
  CounterRng rng{seed};
  bool needs_aux = q.kind == Quantity::ClaRatio;

  // grid pass sizing: square (normalized) or cubic (box) lattice taking at
  // most a quarter of the budget
  uint64_t grid_budget = std::min<uint64_t>(budget / 4, 1u << 14);
  uint64_t per_axis, grid_total;
  if (region.normalized) {
    per_axis = static_cast<uint64_t>(std::sqrt(static_cast<double>(grid_budget)));
    per_axis = std::max<uint64_t>(per_axis, 1);
    grid_total = per_axis * per_axis;
  } else {
    per_axis = static_cast<uint64_t>(std::cbrt(static_cast<double>(grid_budget)));
    per_axis = std::max<uint64_t>(per_axis, 1);
    grid_total = per_axis * per_axis * per_axis;
  }
  if (grid_total > budget) {
    per_axis = 1;
    grid_total = 1;
  }

  InfimumReport rep;
  rep.threshold = violation_threshold;
  rep.samples_drawn = budget;
  if (region.normalized) {
    rep.grid_spacing =
        per_axis > 1
            ? std::max(region.l3_max - region.l3_min,
                       region.l2_max - region.l3_min) / double(per_axis - 1)
            : 0.0;
  } else {
    rep.grid_spacing = per_axis > 1
                           ? (region.box_hi - region.box_lo) / double(per_axis - 1)
                           : 0.0;
  }

  std::vector<std::vector<Candidate>> chunk_top(workers);
  std::vector<uint64_t> chunk_accepted(workers, 0);
  parallel_chunks(budget, workers, [&](int chunk, uint64_t lo, uint64_t hi) {
    auto& top = chunk_top[chunk];
    uint64_t accepted = 0;
    for (uint64_t i = lo; i < hi; ++i) {
      Vec3 l;
      bool ok = i < grid_total ? region.grid_point(i, per_axis, l)
                               : region.draw(rng, i, l);
      if (!ok) continue;
      ++accepted;
      Candidate c;
      c.lambda = l;
      c.index = i;
      if (needs_aux) c.aux = draw_direction(rng, i);
      c.value = eval_quantity(q, l, c.aux);
      if (top.size() < kTopK || better(c, top.back())) keep_topk(top, c);
    }
    chunk_accepted[chunk] = accepted;
  });

  std::vector<Candidate> top;
  for (int c = 0; c < workers; ++c) {
    rep.samples_accepted += chunk_accepted[c];
    for (const auto& cand : chunk_top[c]) keep_topk(top, cand);
  }
  if (top.empty())
    throw std::domain_error("infimum_search: no feasible samples in region");

  double step0 = region.normalized
                     ? 0.05 * (region.l3_max - region.l3_min)
                     : 0.05 * (region.box_hi - region.box_lo);
  Candidate best = top.front();
  for (const auto& cand : top) {
    Candidate refined = pattern_search(q, region, cand, step0, rep.refinement);
    if (better(refined, best)) best = refined;
  }

  rep.value = best.value;
  rep.argmin = best.lambda;
  rep.aux = best.aux;
  rep.has_aux = needs_aux;
  rep.violation = best.value < violation_threshold;
  return rep;
}

ConeConstants estimate_cone_constants(uint64_t budget, uint64_t seed,
                                      const SampleRegion& region,
                                      int workers) {
  if (budget < 10000)
    throw std::invalid_argument("estimate_cone_constants: budget < 1e4");
  ConeConstants cc;
  cc.budget = budget;
  cc.seed = seed;
  InfimumReport a = infimum_search({Quantity::Lemma2R1, 0}, region, budget,
                                   seed, 0.0, workers);
  InfimumReport b = infimum_search({Quantity::Lemma2R23, 0}, region, budget,
                                   seed + 1, 0.0, workers);
  cc.c1 = a.value;
  cc.arg1 = a.argmin;
  cc.c2 = b.value;
  cc.arg2 = b.argmin;
  return cc;
}

}  // namespace s2l
