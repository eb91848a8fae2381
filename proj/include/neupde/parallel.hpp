#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace neupde {

/// Runs `work(chunk_index, begin, end)` over [0, n) split into fixed-size
/// chunks.  The chunk layout depends only on (n, chunk_size); workers grab
/// chunks from an atomic counter, so any worker count produces the same set
/// of (chunk_index, range) calls.  Callers store per-chunk results by index
/// and reduce them in order to stay deterministic.
inline void parallel_chunks(
    std::size_t n, std::size_t chunk_size, unsigned workers,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& work) {
  if (n == 0) return;
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  if (workers <= 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) {
      const std::size_t b = c * chunk_size;
      work(c, b, std::min(n, b + chunk_size));
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto runner = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const std::size_t b = c * chunk_size;
      work(c, b, std::min(n, b + chunk_size));
    }
  };
  std::vector<std::thread> pool;
  const unsigned k = std::min<unsigned>(workers, static_cast<unsigned>(n_chunks));
  pool.reserve(k);
  for (unsigned i = 0; i < k; ++i) pool.emplace_back(runner);
  for (auto& th : pool) th.join();
}

inline std::size_t chunk_count(std::size_t n, std::size_t chunk_size) {
  if (chunk_size == 0) chunk_size = 1;
  return (n + chunk_size - 1) / chunk_size;
}

}  // namespace neupde
