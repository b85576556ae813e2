#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "qboot/random.hpp"
#include "qboot/sample.hpp"

namespace qboot {

enum class PmfKind { exact, binomial, empirical };

/// Discrete distribution over candidate order-statistic indexes.
/// exact/empirical pmfs live on [1, N]; the binomial approximation lives on
/// [0, N+1] (its extreme draws are clamped to real ranks only at extraction).
struct IndexPmf {
  int support_lo = 0;
  int support_hi = 0;
  std::vector<double> probs;  // aligned to [support_lo, support_hi]
  PmfKind kind = PmfKind::exact;
  bool normalized = false;
  std::uint64_t empty_redraws = 0;  // diagnostics, empirical pmfs only

  double prob_at(int i) const noexcept {
    if (i < support_lo || i > support_hi) return 0.0;
    return probs[static_cast<std::size_t>(i - support_lo)];
  }
  double total_mass() const noexcept;
};

/// Truncation controls for the exact pmf evaluation.
struct ExactPmfConfig {
  double poisson_tail_mass = 1e-12;  // outer-sum mass allowed outside window
  int max_n_supported = 300;         // guard: this path is an oracle
};

struct ExactPmfResult {
  IndexPmf raw;         // sums to <= 1; shortfall is events with no valid index
  IndexPmf normalized;  // raw divided by its total mass
};

/// Distribution of the original-sample index observed as the bootstrap
/// quantile, evaluated exactly by summing the three stochastic-rounding
/// branches over the bootstrap-size distribution.
ExactPmfResult exact_index_pmf(int n_sample, QuantileQuery q,
                               const ExactPmfConfig& cfg = {});

/// Bin(n_sample+1, q) pmf over [0, n_sample+1]; terms are evaluated in log
/// space so no probability above ~1e-300 underflows to zero.
IndexPmf binomial_index_pmf(int n_sample, QuantileQuery q);

/// Literal Poisson bootstrap, tallying which original index materializes as
/// the quantile. Rank bookkeeping only; no outcome values are touched. Empty
/// bootstrap samples are redrawn and counted in empty_redraws.
/// Deterministic for any thread count (fixed chunking, per-chunk streams).
IndexPmf simulate_index_pmf(int n_sample, QuantileQuery q,
                            std::uint64_t replications,
                            const RandomSource& rng, unsigned threads = 0);

/// Sup-norm distance over the union of supports; probability outside a
/// pmf's support counts as zero.
double max_abs_pmf_diff(const IndexPmf& a, const IndexPmf& b);

enum class Tail { lower, upper };

/// Conservative discrete quantile of a pmf: for the lower tail, the largest
/// support point i with P(X <= i) <= p (support minimum if none); for the
/// upper tail, the smallest i with P(X >= i) <= 1 - p (support maximum if
/// none). Upper-tail probabilities are suffix sums, not 1 - CDF.
int pmf_quantile(const IndexPmf& pmf, double p, Tail tail);

/// pmf_quantile of Bin(n_sample+1, q), clamped into the valid order-statistic
/// range [1, n_sample]. Lower tails are conventionally supplied p = alpha/2,
/// upper tails p = 1 - alpha/2.
int binomial_index_quantile(int n_sample, QuantileQuery q, double p,
                            Tail tail);

/// Inversion sampler for Bin(trials, q) with a cached CDF table, so the B
/// draws of the fast two-sample path cost one binary search each.
class BinomialSampler {
 public:
  BinomialSampler(int trials, double q);

  int trials() const noexcept { return trials_; }

  int draw(RandomSource& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return trials_;
    return static_cast<int>(it - cdf_.begin());
  }

 private:
  int trials_;
  std::vector<double> cdf_;  // cdf_[k] = P(X <= k)
};

}  // namespace qboot
