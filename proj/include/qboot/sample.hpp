#pragma once

#include <cstddef>
#include <vector>

namespace qboot {

/// Quantile level, restricted to the open interval (0, 1).
class QuantileQuery {
 public:
  explicit QuantileQuery(double q);
  double value() const noexcept { return q_; }

 private:
  double q_;
};

/// Non-decreasing, NaN-free, non-empty outcome vector. Order statistics are
/// addressed with 1-based ranks, matching the usual y_(o) notation.
class SortedSample {
 public:
  /// Wraps an already sorted vector; rejects empty, NaN, or out-of-order input.
  static SortedSample from_sorted(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }

  /// rank is 1-based and must lie in [1, size()].
  double order_statistic(std::size_t rank) const;

  const std::vector<double>& values() const noexcept { return values_; }

 private:
  explicit SortedSample(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
  friend SortedSample sort_sample(std::vector<double> raw);
};

/// Stable sort of raw outcomes into a SortedSample. Rejects empty input and
/// NaNs; ties keep their original relative order.
SortedSample sort_sample(std::vector<double> raw);

}  // namespace qboot
