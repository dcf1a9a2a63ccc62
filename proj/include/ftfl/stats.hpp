#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ftfl {

// Pairwise (cascade) summation.  Deterministic for a fixed element order and
// much smaller rounding drift than a naive running sum; all aggregate
// statistics in this library go through it so results are bit-stable
// regardless of how many worker threads produced the samples.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

struct SampleStats {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean: sd / sqrt(n), sd with n-1
};

inline SampleStats sample_stats(std::span<const double> x) {
  SampleStats out;
  if (x.empty()) return out;
  out.mean = pairwise_sum(x) / double(x.size());
  if (x.size() < 2) return out;
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / double(x.size() - 1);
  out.se = std::sqrt(var / double(x.size()));
  return out;
}

}  // namespace ftfl
