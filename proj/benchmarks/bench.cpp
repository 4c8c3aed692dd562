#include <benchmark/benchmark.h>

#include "sigma2lab/calculus.hpp"
#include "sigma2lab/estimates.hpp"
#include "sigma2lab/graphgeom.hpp"
#include "sigma2lab/pointwise.hpp"
#include "sigma2lab/rng.hpp"
#include "sigma2lab/solver.hpp"

using namespace s2l;

namespace {

SymMat3 cone_matrix(uint64_t i) {
  CounterRng rng{7};
  for (;; ++i) {
    Vec3 l = {rng.uniform(i, 0, -1.5, 3), rng.uniform(i, 1, -1.5, 3),
              rng.uniform(i, 2, -1.5, 3)};
    Sigmas s = sigma_from_lambda(l);
    if (s.s1 > 0 && s.s2 > 0) {
      // shuffle in some off-diagonal mass through a rotation
      Mat3 q = rotation_from_quaternion(
          rng.uniform(i, 3, -1, 1), rng.uniform(i, 4, -1, 1),
          rng.uniform(i, 5, -1, 1), rng.uniform(i, 6, -1, 1));
      return rotate_from(SymMat3::diag(l[0], l[1], l[2]), q);
    }
  }
}

ManufacturedSolution entry(const char* name) {
  for (auto& s : standard_catalog())
    if (s.name == name) return s;
  throw std::logic_error("missing catalog entry");
}

void bm_sigma_all(benchmark::State& state) {
  SymMat3 m = cone_matrix(11);
  for (auto _ : state) benchmark::DoNotOptimize(sigma_all(m));
}
BENCHMARK(bm_sigma_all);

void bm_eigen_sorted(benchmark::State& state) {
  SymMat3 m = cone_matrix(23);
  for (auto _ : state) benchmark::DoNotOptimize(eigen_sorted(m));
}
BENCHMARK(bm_eigen_sorted);

void bm_claim1(benchmark::State& state) {
  Vec3 l = eigen_sorted(cone_matrix(37)).lambda;
  for (auto _ : state) benchmark::DoNotOptimize(claim1_min_eig(l, 0.4));
}
BENCHMARK(bm_claim1);

void bm_v_decomposition(benchmark::State& state) {
  ManufacturedSolution s = entry("trig-pert");
  Jet3 j = s.jet({0.21, -0.13, 0.08});
  RhsEval f = eval_rhs(s.rhs, j);
  for (auto _ : state) benchmark::DoNotOptimize(v_decomposition(j, f));
}
BENCHMARK(bm_v_decomposition);

void bm_jet_at(benchmark::State& state) {
  ManufacturedSolution s = entry("trig-pert");
  GridField u = sample_field([&](const Vec3& x) { return s.jet(x).u; }, -1, 1,
                             33);
  for (auto _ : state) benchmark::DoNotOptimize(jet_at(u, 16, 16, 16));
}
BENCHMARK(bm_jet_at);

void bm_residual_norm(benchmark::State& state) {
  ManufacturedSolution s = entry("quad-aniso");
  GridField u = sample_field([&](const Vec3& x) { return s.jet(x).u; }, -1, 1,
                             static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(residual_norm(u, s.rhs));
}
BENCHMARK(bm_residual_norm)->Arg(17)->Arg(33);

void bm_ball_mass(benchmark::State& state) {
  ManufacturedSolution s = entry("quad-iso");
  GridField u = sample_field([&](const Vec3& x) { return s.jet(x).u; }, -1, 1,
                             17);
  NodeIndex y0{8, 8, 8};
  double delta = 6 * u.h();
  for (auto _ : state)
    benchmark::DoNotOptimize(ball_mass(u, s.rhs, y0, delta, {}));
}
BENCHMARK(bm_ball_mass);

}  // namespace

BENCHMARK_MAIN();
