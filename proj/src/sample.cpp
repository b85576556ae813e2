#include "qboot/sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qboot {

QuantileQuery::QuantileQuery(double q) : q_(q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("quantile level must lie in the open interval (0, 1), got " +
                                std::to_string(q));
  }
}

namespace {

void reject_nan(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) {
      throw std::invalid_argument("sample contains NaN at position " + std::to_string(i));
    }
  }
}

}  // namespace

SortedSample SortedSample::from_sorted(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("sample must not be empty");
  }
  reject_nan(values);
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) {
      throw std::invalid_argument("sample is not sorted at position " + std::to_string(i));
    }
  }
  return SortedSample(std::move(values));
}

double SortedSample::order_statistic(std::size_t rank) const {
  if (rank < 1 || rank > values_.size()) {
    throw std::out_of_range("order-statistic rank " + std::to_string(rank) +
                            " outside [1, " + std::to_string(values_.size()) + "]");
  }
  return values_[rank - 1];
}

SortedSample sort_sample(std::vector<double> raw) {
  if (raw.empty()) {
    throw std::invalid_argument("sample must not be empty");
  }
  reject_nan(raw);
  std::stable_sort(raw.begin(), raw.end());
  return SortedSample(std::move(raw));
}

}  // namespace qboot
