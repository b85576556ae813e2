#include "qboot/quantile.hpp"

#include <cmath>

namespace qboot {

std::size_t g_index_raw(QuantileQuery q, std::size_t n, RandomSource& rng) {
  const double h = q.value() * static_cast<double>(n + 1);
  const double lo = std::floor(h);
  double g = lo;
  if (h != lo && rng.bernoulli(h - lo)) {
    g = lo + 1.0;
  }
  // g lies in [0, n+1]: 0 <= floor(h) and ceil(h) <= n+1 because 0 < h < n+1.
  return static_cast<std::size_t>(g);
}

std::size_t g_index(QuantileQuery q, std::size_t n, RandomSource& rng) {
  const std::size_t rank = g_index_raw(q, n, rng);
  if (rank < 1) return 1;
  return rank > n ? n : rank;
}

double quantile_estimate(const SortedSample& sample, QuantileQuery q,
                         RandomSource& rng) {
  return sample.order_statistic(g_index(q, sample.size(), rng));
}

}  // namespace qboot
