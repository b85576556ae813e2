#include "qboot/index_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qboot/parallel.hpp"
#include "qboot/quantile.hpp"

namespace qboot {

namespace {

// Grow-only cache of log k!, shared by every pmf evaluation on the thread.
const std::vector<double>& log_factorial_table(std::size_t upto) {
  thread_local std::vector<double> table{0.0};  // log 0! = 0
  while (table.size() <= upto) {
    table.push_back(table.back() +
                    std::log(static_cast<double>(table.size())));
  }
  return table;
}

double log_choose(const std::vector<double>& lf, int n, int k) {
  return lf[static_cast<std::size_t>(n)] - lf[static_cast<std::size_t>(k)] -
         lf[static_cast<std::size_t>(n - k)];
}

// Binomial terms below this floor are dropped from truncated sums; the
// discarded mass is orders of magnitude below every comparison tolerance.
constexpr double kTermFloor = 1e-19;

// Sum of Bin(m, a) over x in [x_lo, x_hi], via a ratio recurrence from the
// first term. Degenerate success probabilities short-circuit, which also
// covers the first and last candidate index (a = 0 and a = 1).
double binomial_range_sum(const std::vector<double>& lf, int m, double a,
                          int x_lo, int x_hi) {
  x_lo = std::max(x_lo, 0);
  x_hi = std::min(x_hi, m);
  if (x_lo > x_hi) return 0.0;
  if (a <= 0.0) return x_lo == 0 ? 1.0 : 0.0;
  if (a >= 1.0) return x_hi == m ? 1.0 : 0.0;
  const double log_a = std::log(a);
  const double log_1ma = std::log1p(-a);
  double term = std::exp(log_choose(lf, m, x_lo) + x_lo * log_a +
                         (m - x_lo) * log_1ma);
  double sum = term;
  const double odds = a / (1.0 - a);
  for (int x = x_lo; x < x_hi; ++x) {
    term *= odds * static_cast<double>(m - x) / static_cast<double>(x + 1);
    sum += term;
  }
  return sum;
}

struct Branch {
  int u = 0;        // bootstrap quantile rank
  double weight = 0.0;
};

// Quantile rank(s) at bootstrap size n: one deterministic rank when q(n+1)
// is an integer, otherwise the two stochastic-rounding candidates. The
// floating-point integrality test matches the estimator's, so the exact pmf
// and the simulation always agree on the branch structure.
int select_branches(double q, int n, Branch out[2]) {
  const double h = q * static_cast<double>(n + 1);
  const double lo = std::floor(h);
  if (h == lo) {
    out[0] = {static_cast<int>(lo), 1.0};
    return 1;
  }
  const double r = h - lo;
  out[0] = {static_cast<int>(lo) + 1, r};
  out[1] = {static_cast<int>(lo), 1.0 - r};
  return 2;
}

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double comp = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace

double IndexPmf::total_mass() const noexcept { return compensated_sum(probs); }

ExactPmfResult exact_index_pmf(int n_sample, QuantileQuery q,
                               const ExactPmfConfig& cfg) {
  if (n_sample < 1) {
    throw std::invalid_argument("sample size must be positive");
  }
  if (n_sample > cfg.max_n_supported) {
    throw std::invalid_argument("exact pmf evaluation is limited to N <= " +
                                std::to_string(cfg.max_n_supported));
  }
  if (!(cfg.poisson_tail_mass > 0.0 && cfg.poisson_tail_mass < 1.0)) {
    throw std::invalid_argument("poisson_tail_mass must lie in (0, 1)");
  }

  const int N = n_sample;
  // Poisson(N) weights over n = 0..n_max; the margin puts the ignored right
  // tail far below the configured truncation budget.
  const int n_max =
      N + static_cast<int>(std::ceil(9.0 * std::sqrt(static_cast<double>(N)))) + 25;
  std::vector<double> po(static_cast<std::size_t>(n_max) + 1);
  po[0] = std::exp(static_cast<double>(-N));
  for (int n = 1; n <= n_max; ++n) {
    po[static_cast<std::size_t>(n)] =
        po[static_cast<std::size_t>(n - 1)] * static_cast<double>(N) / n;
  }

  // Trim the summation window, spending at most half the truncation budget
  // per side. n = 0 is excluded structurally: an empty bootstrap sample has
  // no index, and that event is part of the raw pmf's mass shortfall.
  const double half_budget = cfg.poisson_tail_mass / 2.0;
  int n_lo = 1;
  double dropped = 0.0;
  while (n_lo < N && dropped + po[static_cast<std::size_t>(n_lo)] <= half_budget) {
    dropped += po[static_cast<std::size_t>(n_lo)];
    ++n_lo;
  }
  int n_hi = n_max;
  dropped = 0.0;
  while (n_hi > N && dropped + po[static_cast<std::size_t>(n_hi)] <= half_budget) {
    dropped += po[static_cast<std::size_t>(n_hi)];
    --n_hi;
  }

  const auto& lf = log_factorial_table(static_cast<std::size_t>(n_hi) + 1);
  const double pick = 1.0 / N;  // probability a bootstrap element copies index i
  std::vector<double> probs(static_cast<std::size_t>(N), 0.0);
  std::vector<double> binp;  // Bin(n, 1/N) over the frequency of index i

  for (int n = n_lo; n <= n_hi; ++n) {
    Branch branches[2];
    const int n_branches = select_branches(q.value(), n, branches);

    binp.assign(static_cast<std::size_t>(n) + 1, 0.0);
    int p_max = 0;
    if (N == 1) {
      binp[static_cast<std::size_t>(n)] = 1.0;
      p_max = n;
    } else {
      double term = std::exp(n * std::log1p(-pick));
      binp[0] = term;
      const double odds = pick / (1.0 - pick);
      const int past_mode = (n + N) / N + 1;
      for (int p = 0; p < n; ++p) {
        term *= odds * static_cast<double>(n - p) / static_cast<double>(p + 1);
        binp[static_cast<std::size_t>(p) + 1] = term;
        p_max = p + 1;
        if (term < kTermFloor && p + 1 >= past_mode) break;
      }
    }

    const double po_n = po[static_cast<std::size_t>(n)];
    for (int b = 0; b < n_branches; ++b) {
      const int u = branches[b].u;
      if (u < 1 || u > n) continue;  // no valid rank: raw-mass shortfall
      const double weight = po_n * branches[b].weight;
      for (int i = 1; i <= N; ++i) {
        // Conditional on index i appearing p >= 1 times, rank u lands on it
        // exactly when the count drawn from the i-1 smaller indexes lies in
        // [u-p, u-1]; that count is Bin(n-p, (i-1)/(N-1)).
        const double below = N == 1 ? 0.0
                                    : static_cast<double>(i - 1) /
                                          static_cast<double>(N - 1);
        double cond = 0.0;
        for (int p = 1; p <= p_max; ++p) {
          const double bp = binp[static_cast<std::size_t>(p)];
          if (bp < kTermFloor) continue;
          cond += bp * binomial_range_sum(lf, n - p, below, u - p, u - 1);
        }
        probs[static_cast<std::size_t>(i) - 1] += weight * cond;
      }
    }
  }

  ExactPmfResult result;
  result.raw.support_lo = 1;
  result.raw.support_hi = N;
  result.raw.kind = PmfKind::exact;
  result.raw.normalized = false;
  result.raw.probs = std::move(probs);

  result.normalized = result.raw;
  const double total = result.raw.total_mass();
  for (double& v : result.normalized.probs) v /= total;
  result.normalized.normalized = true;
  return result;
}

IndexPmf binomial_index_pmf(int n_sample, QuantileQuery q) {
  if (n_sample < 1) {
    throw std::invalid_argument("sample size must be positive");
  }
  const int m = n_sample + 1;
  const auto& lf = log_factorial_table(static_cast<std::size_t>(m));
  const double log_q = std::log(q.value());
  const double log_1mq = std::log1p(-q.value());
  IndexPmf pmf;
  pmf.support_lo = 0;
  pmf.support_hi = m;
  pmf.kind = PmfKind::binomial;
  pmf.probs.resize(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) {
    pmf.probs[static_cast<std::size_t>(k)] =
        std::exp(log_choose(lf, m, k) + k * log_q + (m - k) * log_1mq);
  }
  // Renormalize away the rounding drift of the term-by-term evaluation.
  const double total = pmf.total_mass();
  for (double& v : pmf.probs) v /= total;
  pmf.normalized = true;
  return pmf;
}

IndexPmf simulate_index_pmf(int n_sample, QuantileQuery q,
                            std::uint64_t replications,
                            const RandomSource& rng, unsigned threads) {
  if (n_sample < 1) {
    throw std::invalid_argument("sample size must be positive");
  }
  if (replications < 1) {
    throw std::invalid_argument("replication count must be positive");
  }
  const int N = n_sample;
  const unsigned n_chunks = detail::kSimChunks;
  std::vector<std::vector<std::uint64_t>> counts(n_chunks);
  std::vector<std::uint64_t> redraws(n_chunks, 0);

  // Tally over [0, N+1]: a rank that rounds below the first or above the
  // last resampled element is recorded at the sentinel indexes 0 / N+1
  // rather than clamped, so the empirical law is comparable to the binomial
  // approximation over the union of both supports.
  const std::size_t n_bins = static_cast<std::size_t>(N) + 2;

  detail::run_chunked(
      replications, n_chunks, threads,
      [&](unsigned chunk, std::uint64_t begin, std::uint64_t end) {
        RandomSource stream = rng.split(chunk);
        std::vector<std::uint64_t> local(n_bins, 0);
        std::vector<std::uint32_t> freq(static_cast<std::size_t>(N));
        std::uint64_t local_redraws = 0;
        for (std::uint64_t rep = begin; rep < end; ++rep) {
          std::uint64_t size = 0;
          do {
            size = 0;
            for (int j = 0; j < N; ++j) {
              const auto f = static_cast<std::uint32_t>(stream.poisson_unit());
              freq[static_cast<std::size_t>(j)] = f;
              size += f;
            }
            if (size == 0) ++local_redraws;
          } while (size == 0);
          const std::uint64_t u =
              g_index_raw(q, static_cast<std::size_t>(size), stream);
          if (u < 1) {
            ++local[0];
          } else if (u > size) {
            ++local[n_bins - 1];
          } else {
            std::uint64_t cum = 0;
            std::size_t idx = 0;
            while (cum < u) {
              cum += freq[idx];
              ++idx;
            }
            ++local[idx];
          }
        }
        counts[chunk] = std::move(local);
        redraws[chunk] = local_redraws;
      });

  IndexPmf pmf;
  pmf.support_lo = 0;
  pmf.support_hi = N + 1;
  pmf.kind = PmfKind::empirical;
  pmf.normalized = true;
  pmf.probs.assign(n_bins, 0.0);
  for (unsigned c = 0; c < n_chunks; ++c) {
    if (counts[c].empty()) continue;
    for (std::size_t i = 0; i < n_bins; ++i) {
      pmf.probs[i] += static_cast<double>(counts[c][i]);
    }
    pmf.empty_redraws += redraws[c];
  }
  for (double& v : pmf.probs) v /= static_cast<double>(replications);
  return pmf;
}

double max_abs_pmf_diff(const IndexPmf& a, const IndexPmf& b) {
  const int lo = std::min(a.support_lo, b.support_lo);
  const int hi = std::max(a.support_hi, b.support_hi);
  double worst = 0.0;
  for (int i = lo; i <= hi; ++i) {
    worst = std::max(worst, std::fabs(a.prob_at(i) - b.prob_at(i)));
  }
  return worst;
}

int pmf_quantile(const IndexPmf& pmf, double p, Tail tail) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("tail probability must lie in the open interval (0, 1)");
  }
  if (pmf.probs.empty()) {
    throw std::invalid_argument("pmf has empty support");
  }
  if (tail == Tail::lower) {
    int result = pmf.support_lo;
    double cum = 0.0;
    for (int i = pmf.support_lo; i <= pmf.support_hi; ++i) {
      cum += pmf.prob_at(i);
      if (cum > p) break;
      result = i;
    }
    return result;
  }
  int result = pmf.support_hi;
  const double threshold = 1.0 - p;
  double cum = 0.0;
  for (int i = pmf.support_hi; i >= pmf.support_lo; --i) {
    cum += pmf.prob_at(i);
    if (cum > threshold) break;
    result = i;
  }
  return result;
}

int binomial_index_quantile(int n_sample, QuantileQuery q, double p,
                            Tail tail) {
  const IndexPmf pmf = binomial_index_pmf(n_sample, q);
  return std::clamp(pmf_quantile(pmf, p, tail), 1, n_sample);
}

BinomialSampler::BinomialSampler(int trials, double prob) : trials_(trials) {
  if (trials < 0) {
    throw std::invalid_argument("trial count must be nonnegative");
  }
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::invalid_argument("success probability must lie in the open interval (0, 1)");
  }
  const auto& lf = log_factorial_table(static_cast<std::size_t>(trials));
  const double log_p = std::log(prob);
  const double log_1mp = std::log1p(-prob);
  cdf_.resize(static_cast<std::size_t>(trials) + 1);
  double cum = 0.0;
  for (int k = 0; k <= trials; ++k) {
    cum += std::exp(log_choose(lf, trials, k) + k * log_p +
                    (trials - k) * log_1mp);
    cdf_[static_cast<std::size_t>(k)] = std::min(cum, 1.0);
  }
  cdf_.back() = 1.0;  // the right edge must dominate every uniform draw
}

}  // namespace qboot
