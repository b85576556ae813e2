#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qboot/sample.hpp"

namespace qboot {

enum class CiMethod { classic, fast };

/// Query parameters for a confidence-interval computation. b_replications is
/// ignored by the fast one-sample path, which needs no resampling at all.
struct CiRequest {
  QuantileQuery q;
  double alpha = 0.05;
  std::uint64_t b_replications = 100000;
  CiMethod method = CiMethod::fast;
  std::uint64_t seed = 0;
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double nominal_level = 0.0;  // 1 - alpha
  CiMethod method = CiMethod::fast;
  double q = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::pair<int, int>> indexes_used;  // fast one-sample only
  std::optional<std::uint64_t> b_used;
  std::uint64_t empty_redraws = 0;  // not serialized; classic diagnostics
};

struct TwoSampleData {
  SortedSample treatment;
  SortedSample control;
};

/// Conservative empirical quantile pair: lower endpoint at rank
/// max(1, floor((B+1)*alpha/2)), upper at rank min(B, ceil((B+1)*(1-alpha/2))).
/// Endpoints are always elements of the input.
std::pair<double, double> conservative_empirical_quantiles(
    std::vector<double> estimates, double alpha);

/// Literal Poisson bootstrap over B replications, computed rank-wise on the
/// sorted sample (no bootstrap vectors are materialized). Empty bootstrap
/// samples are redrawn and counted.
ConfidenceInterval classic_ci_one_sample(const SortedSample& sample,
                                         const CiRequest& req,
                                         unsigned threads = 1);

/// Resampling-free interval: the CI is the pair of order statistics at the
/// conservative lower/upper quantiles of the binomial index distribution.
/// Consumes no randomness.
ConfidenceInterval fast_ci_one_sample(const SortedSample& sample,
                                      const CiRequest& req);

/// Paired Poisson bootstraps over both groups; returns conservative
/// empirical quantiles of the B difference-in-quantile estimates.
ConfidenceInterval classic_ci_two_sample(const TwoSampleData& data,
                                         const CiRequest& req,
                                         unsigned threads = 1);

/// Draws B order-statistic indexes per group from Bin(N+1, q), differences
/// the extracted order statistics, and returns conservative empirical
/// quantiles of the difference vector. O(B) given sorted inputs.
ConfidenceInterval fast_ci_two_sample(const TwoSampleData& data,
                                      const CiRequest& req,
                                      unsigned threads = 1);

}  // namespace qboot
