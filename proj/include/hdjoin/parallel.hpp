#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace hdjoin {

inline unsigned hardwareWorkers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into `chunks` contiguous near-equal pieces and calls
/// fn(chunk, begin, end) for each, using up to `workers` threads.
/// Chunk boundaries depend only on n and chunks, never on scheduling.
template <class Fn>
void parallelChunks(std::size_t n, std::size_t chunks, unsigned workers, Fn&& fn) {
  if (chunks == 0) return;
  auto bounds = [&](std::size_t c) { return n * c / chunks; };
  const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), chunks);
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c, bounds(c), bounds(c + 1));
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t c = t; c < chunks; c += threads) fn(c, bounds(c), bounds(c + 1));
    });
  }
}

}  // namespace hdjoin
