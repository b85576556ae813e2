#include "qboot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qboot/index_pmf.hpp"
#include "qboot/parallel.hpp"
#include "qboot/quantile.hpp"
#include "qboot/random.hpp"

namespace qboot {

namespace {

void validate_request(const CiRequest& req, bool needs_b) {
  if (!(req.alpha > 0.0 && req.alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in the open interval (0, 1)");
  }
  if (needs_b && req.b_replications < 1) {
    throw std::invalid_argument("bootstrap replication count must be positive");
  }
}

ConfidenceInterval base_interval(const CiRequest& req, CiMethod method) {
  ConfidenceInterval ci;
  ci.nominal_level = 1.0 - req.alpha;
  ci.method = method;
  ci.q = req.q.value();
  ci.alpha = req.alpha;
  ci.seed = req.seed;
  return ci;
}

// One Poisson bootstrap quantile estimate, computed rank-wise: draw each
// original index's frequency, pick the bootstrap rank, and read off the
// order statistic owning that rank. No bootstrap vector is materialized.
double poisson_bootstrap_estimate(const SortedSample& sample, QuantileQuery q,
                                  RandomSource& rng,
                                  std::vector<std::uint32_t>& freq,
                                  std::uint64_t& empty_redraws) {
  const std::size_t n = sample.size();
  std::uint64_t size = 0;
  do {
    size = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto f = static_cast<std::uint32_t>(rng.poisson_unit());
      freq[j] = f;
      size += f;
    }
    if (size == 0) ++empty_redraws;
  } while (size == 0);
  const std::size_t u = g_index(q, static_cast<std::size_t>(size), rng);
  std::uint64_t cum = 0;
  std::size_t idx = 0;
  while (cum < u) {
    cum += freq[idx];
    ++idx;
  }
  return sample.order_statistic(idx);
}

}  // namespace

std::pair<double, double> conservative_empirical_quantiles(
    std::vector<double> estimates, double alpha) {
  if (estimates.empty()) {
    throw std::invalid_argument("estimate vector must not be empty");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in the open interval (0, 1)");
  }
  const double b = static_cast<double>(estimates.size());
  const auto lo_rank = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor((b + 1.0) * (alpha / 2.0))));
  const auto hi_rank = std::min<std::size_t>(
      estimates.size(),
      static_cast<std::size_t>(std::ceil((b + 1.0) * (1.0 - alpha / 2.0))));

  const auto lo_it =
      estimates.begin() + static_cast<std::ptrdiff_t>(lo_rank - 1);
  std::nth_element(estimates.begin(), lo_it, estimates.end());
  const double lower = *lo_it;
  double upper = lower;
  if (hi_rank > lo_rank) {
    const auto hi_it =
        estimates.begin() + static_cast<std::ptrdiff_t>(hi_rank - 1);
    std::nth_element(lo_it + 1, hi_it, estimates.end());
    upper = *hi_it;
  }
  return {lower, upper};
}

ConfidenceInterval classic_ci_one_sample(const SortedSample& sample,
                                         const CiRequest& req,
                                         unsigned threads) {
  validate_request(req, true);
  std::vector<double> estimates(req.b_replications);
  std::vector<std::uint64_t> redraws(detail::kCiChunks, 0);
  const RandomSource root(req.seed);

  detail::run_chunked(
      req.b_replications, detail::kCiChunks, threads,
      [&](unsigned chunk, std::uint64_t begin, std::uint64_t end) {
        RandomSource stream = root.split(chunk);
        std::vector<std::uint32_t> freq(sample.size());
        std::uint64_t local_redraws = 0;
        for (std::uint64_t rep = begin; rep < end; ++rep) {
          estimates[rep] = poisson_bootstrap_estimate(sample, req.q, stream,
                                                      freq, local_redraws);
        }
        redraws[chunk] = local_redraws;
      });

  ConfidenceInterval ci = base_interval(req, CiMethod::classic);
  std::tie(ci.lower, ci.upper) =
      conservative_empirical_quantiles(std::move(estimates), req.alpha);
  ci.b_used = req.b_replications;
  for (const auto r : redraws) ci.empty_redraws += r;
  return ci;
}

ConfidenceInterval fast_ci_one_sample(const SortedSample& sample,
                                      const CiRequest& req) {
  validate_request(req, false);
  const int n = static_cast<int>(sample.size());
  const IndexPmf pmf = binomial_index_pmf(n, req.q);
  const int lo_idx =
      std::clamp(pmf_quantile(pmf, req.alpha / 2.0, Tail::lower), 1, n);
  const int hi_idx =
      std::clamp(pmf_quantile(pmf, 1.0 - req.alpha / 2.0, Tail::upper), 1, n);
  ConfidenceInterval ci = base_interval(req, CiMethod::fast);
  ci.lower = sample.order_statistic(static_cast<std::size_t>(lo_idx));
  ci.upper = sample.order_statistic(static_cast<std::size_t>(hi_idx));
  ci.indexes_used = std::make_pair(lo_idx, hi_idx);
  return ci;
}

ConfidenceInterval classic_ci_two_sample(const TwoSampleData& data,
                                         const CiRequest& req,
                                         unsigned threads) {
  validate_request(req, true);
  std::vector<double> estimates(req.b_replications);
  std::vector<std::uint64_t> redraws(detail::kCiChunks, 0);
  const RandomSource root(req.seed);

  detail::run_chunked(
      req.b_replications, detail::kCiChunks, threads,
      [&](unsigned chunk, std::uint64_t begin, std::uint64_t end) {
        RandomSource stream = root.split(chunk);
        std::vector<std::uint32_t> freq_t(data.treatment.size());
        std::vector<std::uint32_t> freq_c(data.control.size());
        std::uint64_t local_redraws = 0;
        for (std::uint64_t rep = begin; rep < end; ++rep) {
          const double t = poisson_bootstrap_estimate(
              data.treatment, req.q, stream, freq_t, local_redraws);
          const double c = poisson_bootstrap_estimate(
              data.control, req.q, stream, freq_c, local_redraws);
          estimates[rep] = t - c;
        }
        redraws[chunk] = local_redraws;
      });

  ConfidenceInterval ci = base_interval(req, CiMethod::classic);
  std::tie(ci.lower, ci.upper) =
      conservative_empirical_quantiles(std::move(estimates), req.alpha);
  ci.b_used = req.b_replications;
  for (const auto r : redraws) ci.empty_redraws += r;
  return ci;
}

ConfidenceInterval fast_ci_two_sample(const TwoSampleData& data,
                                      const CiRequest& req, unsigned threads) {
  validate_request(req, true);
  const int n_t = static_cast<int>(data.treatment.size());
  const int n_c = static_cast<int>(data.control.size());
  const BinomialSampler sampler_t(n_t + 1, req.q.value());
  const BinomialSampler sampler_c(n_c + 1, req.q.value());
  std::vector<double> estimates(req.b_replications);
  const RandomSource root(req.seed);

  detail::run_chunked(
      req.b_replications, detail::kCiChunks, threads,
      [&](unsigned chunk, std::uint64_t begin, std::uint64_t end) {
        RandomSource stream = root.split(chunk);
        for (std::uint64_t rep = begin; rep < end; ++rep) {
          // Binomial support reaches 0 and N+1; both collapse onto the
          // nearest real rank when the order statistic is extracted.
          const int rank_t = std::clamp(sampler_t.draw(stream), 1, n_t);
          const int rank_c = std::clamp(sampler_c.draw(stream), 1, n_c);
          estimates[rep] =
              data.treatment.order_statistic(static_cast<std::size_t>(rank_t)) -
              data.control.order_statistic(static_cast<std::size_t>(rank_c));
        }
      });

  ConfidenceInterval ci = base_interval(req, CiMethod::fast);
  std::tie(ci.lower, ci.upper) =
      conservative_empirical_quantiles(std::move(estimates), req.alpha);
  ci.b_used = req.b_replications;
  return ci;
}

}  // namespace qboot
