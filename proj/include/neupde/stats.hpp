#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace neupde {

/// Pairwise (cascade) summation.  Order of the input fixes the result
/// bit-for-bit, independent of how the input was produced.
inline double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : xs) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  long n = 0;
};

/// Per-chunk running sums.  Chunks are indexed deterministically by the
/// caller; combining happens in chunk order so results never depend on the
/// number of workers.
struct ChunkSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  long n = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
};

inline MeanSe combine_chunks(std::span<const ChunkSums> chunks) {
  std::vector<double> sums, sqs;
  sums.reserve(chunks.size());
  sqs.reserve(chunks.size());
  long n = 0;
  for (const auto& c : chunks) {
    sums.push_back(c.sum);
    sqs.push_back(c.sum_sq);
    n += c.n;
  }
  MeanSe out;
  out.n = n;
  if (n == 0) return out;
  const double s = pairwise_sum(sums);
  const double q = pairwise_sum(sqs);
  out.mean = s / static_cast<double>(n);
  if (n > 1) {
    double var = (q - s * out.mean) / static_cast<double>(n - 1);
    if (var < 0.0) var = 0.0;
    out.se = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

}  // namespace neupde
