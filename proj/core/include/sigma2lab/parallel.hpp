#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace s2l {

inline int default_workers() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 16u));
}

// Runs body(chunk_index, begin, end) over a contiguous partition of
// [0, total). Chunk boundaries depend only on (total, workers), so any
// per-chunk results a caller collects into a chunk-indexed vector merge
// deterministically.
inline void parallel_chunks(
    uint64_t total, int workers,
    const std::function<void(int, uint64_t, uint64_t)>& body) {
  if (workers < 1) workers = 1;
  uint64_t nchunks = std::min<uint64_t>(workers, total ? total : 1);
  if (nchunks <= 1) {
    body(0, 0, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nchunks);
  uint64_t per = total / nchunks, rem = total % nchunks;
  uint64_t begin = 0;
  for (uint64_t c = 0; c < nchunks; ++c) {
    uint64_t len = per + (c < rem ? 1 : 0);
    uint64_t end = begin + len;
    pool.emplace_back(body, static_cast<int>(c), begin, end);
    begin = end;
  }
  for (auto& t : pool) t.join();
}

}  // namespace s2l
