#pragma once

#include <cstdint>

namespace s2l {

// Counter-based generator: every draw is a pure function of
// (seed, index, dim), so parallel samplers can hand out index ranges to
// workers and still reproduce the sequential stream bit for bit.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct CounterRng {
  uint64_t seed = 0;

  uint64_t bits(uint64_t index, uint64_t dim) const {
    uint64_t k = splitmix64(index * 0x9e3779b97f4a7c15ULL + dim);
    return splitmix64(seed ^ k);
  }
  // uniform in [0, 1)
  double u01(uint64_t index, uint64_t dim) const {
    return static_cast<double>(bits(index, dim) >> 11) * 0x1.0p-53;
  }
  double uniform(uint64_t index, uint64_t dim, double lo, double hi) const {
    return lo + (hi - lo) * u01(index, dim);
  }
};

}  // namespace s2l
