#pragma once

#include <cstddef>

#include "qboot/random.hpp"
#include "qboot/sample.hpp"

namespace qboot {

/// Stochastic-rounding quantile rank without boundary clamping. Returns
/// q(n+1) when that is an integer; otherwise rounds up with probability
/// equal to the fractional part of q(n+1) and down with the complementary
/// probability, consuming exactly one uniform variate. The result lies in
/// [0, n+1]: 0 and n+1 signal that the rank fell below or above every
/// element, which the index-distribution studies tally as-is.
std::size_t g_index_raw(QuantileQuery q, std::size_t n, RandomSource& rng);

/// g_index_raw clamped into [1, n]: the estimator form, which always names
/// a real order statistic.
std::size_t g_index(QuantileQuery q, std::size_t n, RandomSource& rng);

/// Selects the order statistic at g_index; the estimate is always an
/// element of the sample, never an interpolation.
double quantile_estimate(const SortedSample& sample, QuantileQuery q,
                         RandomSource& rng);

}  // namespace qboot
