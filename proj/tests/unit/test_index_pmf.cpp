#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "qboot/index_pmf.hpp"
#include "qboot/random.hpp"
#include "qboot/sample.hpp"

using qboot::BinomialSampler;
using qboot::IndexPmf;
using qboot::PmfKind;
using qboot::QuantileQuery;
using qboot::RandomSource;
using qboot::Tail;

namespace {

// ---------------------------------------------------------------------------
// Oracle 1: first-principles trinomial double sum.
//
// Condition on the bootstrap size n (Poisson with mean N), then on the
// stochastically rounded position u. One bootstrap draw lands on sample
// index i with probability 1/N, strictly below it with probability
// (i-1)/N, strictly above with (N-i)/N. Index i is extracted exactly when
// at least one draw hits i and fewer than u draws land strictly below,
// with enough mass at or below position u; summing the trinomial pmf over
// that event gives the unconditional probability. Deliberately slow and
// direct - no factorization, no recurrences - so it shares nothing with
// the production evaluation beyond arithmetic.
// ---------------------------------------------------------------------------

std::vector<std::pair<int, double>> rounding_branches(double q, int n) {
  const double h = q * (n + 1);
  const double lo = std::floor(h);
  if (h == lo) return {{static_cast<int>(lo), 1.0}};
  const double r = h - lo;
  return {{static_cast<int>(lo) + 1, r}, {static_cast<int>(lo), 1.0 - r}};
}

std::vector<double> oracle_trinomial_pmf(int n_sample, double q) {
  const double rate = n_sample;
  const int n_hi =
      n_sample + static_cast<int>(std::ceil(15.0 * std::sqrt(rate))) + 60;
  std::vector<double> log_fact(static_cast<std::size_t>(n_hi) + 1, 0.0);
  for (int k = 1; k <= n_hi; ++k) {
    log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));
  }

  std::vector<double> probs(n_sample, 0.0);
  for (int n = 1; n <= n_hi; ++n) {
    const double log_po = -rate + n * std::log(rate) - log_fact[n];
    for (const auto& [u, w] : rounding_branches(q, n)) {
      if (u < 1 || u > n) continue;
      for (int i = 1; i <= n_sample; ++i) {
        const double pick = 1.0 / n_sample;
        const double below = static_cast<double>(i - 1) / n_sample;
        const double above = static_cast<double>(n_sample - i) / n_sample;
        double cond = 0.0;
        for (int p = 1; p <= n; ++p) {
          const int x_lo = std::max(0, u - p);
          const int x_hi = std::min(u - 1, n - p);
          for (int x = x_lo; x <= x_hi; ++x) {
            const int rest = n - p - x;
            if (rest < 0) continue;
            if (below == 0.0 && x > 0) continue;
            if (above == 0.0 && rest > 0) continue;
            double lt = log_fact[n] - log_fact[p] - log_fact[x] -
                        log_fact[rest] + p * std::log(pick);
            if (x > 0) lt += x * std::log(below);
            if (rest > 0) lt += rest * std::log(above);
            cond += std::exp(lt);
          }
        }
        probs[static_cast<std::size_t>(i) - 1] += std::exp(log_po) * w * cond;
      }
    }
  }
  return probs;
}

// ---------------------------------------------------------------------------
// Oracle 2: exhaustive enumeration of Poisson frequency vectors.
//
// The bootstrap draws each observation's frequency as an independent
// Poisson(1) count. Enumerate every frequency vector up to a total-count
// cap, walk the implied sorted bootstrap sample to find which index owns
// the rounded position, and accumulate exact probabilities. This checks
// the distributional claim itself, not any particular formula for it.
// ---------------------------------------------------------------------------

std::vector<double> oracle_enumerated_pmf(int n_sample, double q, int cap) {
  std::vector<double> probs(n_sample, 0.0);
  std::vector<int> freq(n_sample, 0);

  std::function<void(int, int, double)> visit = [&](int idx, int total,
                                                    double logp) {
    if (idx == n_sample) {
      if (total < 1) return;
      for (const auto& [u, w] : rounding_branches(q, total)) {
        if (u < 1 || u > total) continue;  // events the raw pmf excludes
        int cum = 0;
        for (int j = 0; j < n_sample; ++j) {
          cum += freq[j];
          if (cum >= u) {
            probs[j] += std::exp(logp) * w;
            break;
          }
        }
      }
      return;
    }
    for (int f = 0; total + f <= cap; ++f) {
      freq[idx] = f;
      visit(idx + 1, total + f, logp - 1.0 - std::lgamma(f + 1.0));
    }
    freq[idx] = 0;
  };
  visit(0, 0, 0.0);
  return probs;
}

double max_abs_against(const IndexPmf& pmf, const std::vector<double>& ref) {
  REQUIRE(pmf.support_lo == 1);
  REQUIRE(pmf.support_hi == static_cast<int>(ref.size()));
  double worst = 0.0;
  for (int i = 1; i <= pmf.support_hi; ++i) {
    worst = std::max(worst,
                     std::abs(pmf.prob_at(i) - ref[static_cast<size_t>(i) - 1]));
  }
  return worst;
}

// Independent log-space binomial pmf evaluation for spot checks.
double binom_pmf(int trials, double p, int k) {
  const double lc = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) -
                    std::lgamma(trials - k + 1.0);
  double lt = lc;
  if (k > 0) lt += k * std::log(p);
  if (trials - k > 0) lt += (trials - k) * std::log1p(-p);
  return std::exp(lt);
}

IndexPmf make_pmf(int lo, std::vector<double> probs) {
  IndexPmf pmf;
  pmf.support_lo = lo;
  pmf.support_hi = lo + static_cast<int>(probs.size()) - 1;
  pmf.probs = std::move(probs);
  pmf.kind = PmfKind::exact;
  pmf.normalized = true;
  return pmf;
}

}  // namespace

TEST_SUITE("index_pmf") {
  TEST_CASE("exact pmf matches the trinomial double-sum oracle") {
    for (const int n : {5, 13, 20}) {
      for (const double q : {0.1, 0.5, 0.737}) {
        CAPTURE(n);
        CAPTURE(q);
        const auto oracle = oracle_trinomial_pmf(n, q);
        const auto result = qboot::exact_index_pmf(n, QuantileQuery(q));
        CHECK(max_abs_against(result.raw, oracle) < 1e-11);
      }
    }
  }

  TEST_CASE("exact pmf matches exhaustive frequency-vector enumeration") {
    struct Cell {
      int n;
      int cap;
    };
    for (const auto& [n, cap] : {Cell{1, 30}, Cell{2, 30}, Cell{4, 26}}) {
      for (const double q : {0.1, 0.5, 0.737}) {
        CAPTURE(n);
        CAPTURE(q);
        const auto oracle = oracle_enumerated_pmf(n, q, cap);
        const auto result = qboot::exact_index_pmf(n, QuantileQuery(q));
        CHECK(max_abs_against(result.raw, oracle) < 1e-9);
      }
    }
  }

  TEST_CASE("raw mass stays in (0, 1]; normalized mass is one") {
    // The raw distribution drops rounding branches whose rank falls outside
    // the resampled set, so its mass falls short of one.  The shortfall is
    // large when N*q or N*(1-q) is small (at N=1 even the median loses the
    // whole P(S=0)=1/e slice) and negligible once N is moderate.
    for (const int n : {1, 5, 50, 200}) {
      for (const double q : {0.03, 0.25, 0.5, 0.97}) {
        CAPTURE(n);
        CAPTURE(q);
        const auto result = qboot::exact_index_pmf(n, QuantileQuery(q));
        CHECK(result.raw.total_mass() <= 1.0 + 1e-12);
        CHECK(result.raw.total_mass() > 0.0);
        if (n >= 50 && q >= 0.25 && q <= 0.75) {
          CHECK(result.raw.total_mass() > 0.999);
        }
        CHECK(result.normalized.total_mass() ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK_FALSE(result.raw.normalized);
        CHECK(result.normalized.normalized);
        CHECK(result.raw.kind == PmfKind::exact);
      }
    }
    // Hand-computed series for N=1: only ranks inside [1, s] survive, so
    // for the median the raw mass is P(S >= 1) = 1 - 1/e.
    const auto median_n1 = qboot::exact_index_pmf(1, QuantileQuery(0.5));
    CHECK(median_n1.raw.total_mass() ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
  }

  TEST_CASE("exact pmf rejects unsupported inputs") {
    CHECK_THROWS_AS(qboot::exact_index_pmf(0, QuantileQuery(0.5)),
                    std::invalid_argument);
    CHECK_THROWS_AS(qboot::exact_index_pmf(301, QuantileQuery(0.5)),
                    std::invalid_argument);
    qboot::ExactPmfConfig cfg;
    cfg.poisson_tail_mass = 0.0;
    CHECK_THROWS_AS(qboot::exact_index_pmf(10, QuantileQuery(0.5), cfg),
                    std::invalid_argument);
  }

  TEST_CASE("binomial pmf normalizes and matches direct term evaluation") {
    for (const int n : {1, 10, 100, 1000, 10000}) {
      for (const double q : {0.01, 0.5, 0.999}) {
        CAPTURE(n);
        CAPTURE(q);
        const IndexPmf pmf = qboot::binomial_index_pmf(n, QuantileQuery(q));
        REQUIRE(pmf.support_lo == 0);
        REQUIRE(pmf.support_hi == n + 1);
        CHECK(pmf.kind == PmfKind::binomial);
        CHECK(pmf.normalized);
        CHECK(std::abs(pmf.total_mass() - 1.0) <= 1e-12);
        for (const int k : {0, (n + 1) / 2, n + 1}) {
          CHECK(pmf.prob_at(k) ==
                doctest::Approx(binom_pmf(n + 1, q, k)).epsilon(1e-9));
        }
      }
    }
    CHECK_THROWS_AS(qboot::binomial_index_pmf(0, QuantileQuery(0.5)),
                    std::invalid_argument);
  }

  TEST_CASE("exact-to-binomial distance shrinks with sample size") {
    const auto dist = [](int n, double q) {
      return qboot::max_abs_pmf_diff(
          qboot::exact_index_pmf(n, QuantileQuery(q)).normalized,
          qboot::binomial_index_pmf(n, QuantileQuery(q)));
    };
    // Extreme quantiles at small N approximate poorly; the median does not.
    // At (100, 0.01) the gap is dominated by Bin(101, 0.01) putting
    // P(X=0) = 0.99^101 ~ 0.362 on index 0, which the exact law never hits.
    CHECK(dist(100, 0.01) > 0.30);
    CHECK(dist(100, 0.01) < 0.40);
    CHECK(dist(100, 0.5) < 0.002);
    CHECK(dist(50, 0.25) > dist(150, 0.25));
  }

  TEST_CASE("simulated pmf agrees with the exact distribution") {
    RandomSource rng(17);
    const IndexPmf sim =
        qboot::simulate_index_pmf(10, QuantileQuery(0.3), 300000, rng);
    CHECK(sim.kind == PmfKind::empirical);
    CHECK(sim.normalized);
    CHECK(sim.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    const auto exact = qboot::exact_index_pmf(10, QuantileQuery(0.3));
    CHECK(qboot::max_abs_pmf_diff(sim, exact.normalized) < 0.01);
  }

  TEST_CASE("out-of-range ranks are tallied at the sentinel indexes") {
    // At q=0.01, N=100 the rank rounds below every resampled element with
    // probability ~0.0350 (series sum over Poisson sizes with h < 1), which
    // must land on sentinel index 0, not be clamped onto index 1.
    const IndexPmf low = qboot::simulate_index_pmf(
        100, QuantileQuery(0.01), 200000, RandomSource(21));
    REQUIRE(low.support_lo == 0);
    REQUIRE(low.support_hi == 101);
    CHECK(low.prob_at(0) == doctest::Approx(0.0350).epsilon(0.12));
    CHECK(low.prob_at(101) == 0.0);
    CHECK(low.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

    // Mirrored regime: q=0.999 at N=10 rounds above the resample almost
    // always, so nearly all mass sits on sentinel index N+1.
    const IndexPmf high = qboot::simulate_index_pmf(
        10, QuantileQuery(0.999), 50000, RandomSource(22));
    CHECK(high.prob_at(11) > 0.9);
    CHECK(high.prob_at(0) == 0.0);
  }

  TEST_CASE("simulation is reproducible and thread-count invariant") {
    const QuantileQuery q(0.3);
    const IndexPmf one =
        qboot::simulate_index_pmf(30, q, 50000, RandomSource(5), 1);
    const IndexPmf four =
        qboot::simulate_index_pmf(30, q, 50000, RandomSource(5), 4);
    const IndexPmf again =
        qboot::simulate_index_pmf(30, q, 50000, RandomSource(5), 4);
    REQUIRE(one.probs.size() == four.probs.size());
    for (std::size_t i = 0; i < one.probs.size(); ++i) {
      CHECK(one.probs[i] == four.probs[i]);
      CHECK(one.probs[i] == again.probs[i]);
    }
    CHECK(one.empty_redraws == four.empty_redraws);
  }

  TEST_CASE("empty bootstrap samples are redrawn and counted") {
    // At N=1 a draw is empty with probability e^{-1}, so redraws are certain
    // over 20000 replications.
    const IndexPmf pmf = qboot::simulate_index_pmf(
        1, QuantileQuery(0.5), 20000, RandomSource(8));
    CHECK(pmf.empty_redraws > 0);
    CHECK(pmf.prob_at(1) == 1.0);
    CHECK_THROWS_AS(
        qboot::simulate_index_pmf(5, QuantileQuery(0.5), 0, RandomSource(1)),
        std::invalid_argument);
  }

  TEST_CASE("sup distance handles mismatched supports") {
    const IndexPmf a = make_pmf(1, {0.5, 0.5});
    const IndexPmf b = make_pmf(2, {1.0, 0.0});
    CHECK(qboot::max_abs_pmf_diff(a, b) == 0.5);
    CHECK(qboot::max_abs_pmf_diff(a, a) == 0.0);
    CHECK(a.prob_at(0) == 0.0);
    CHECK(a.prob_at(3) == 0.0);
  }

  TEST_CASE("conservative pmf quantiles bracket from both sides") {
    const IndexPmf pmf = make_pmf(1, {0.25, 0.25, 0.25, 0.25});
    CHECK(qboot::pmf_quantile(pmf, 0.5, Tail::lower) == 2);
    CHECK(qboot::pmf_quantile(pmf, 0.5, Tail::upper) == 3);
    // No CDF point at or below 0.2: fall back to the support minimum.
    CHECK(qboot::pmf_quantile(pmf, 0.2, Tail::lower) == 1);
    // No suffix at or below 0.1: fall back to the support maximum.
    CHECK(qboot::pmf_quantile(pmf, 0.9, Tail::upper) == 4);
    CHECK_THROWS_AS(qboot::pmf_quantile(pmf, 0.0, Tail::lower),
                    std::invalid_argument);
  }

  TEST_CASE("binomial index quantiles match reference values") {
    struct Case {
      int n;
      double q;
      double alpha;
      int lo;
      int hi;
    };
    // Reference integers from an independent binomial-CDF implementation.
    const Case cases[] = {
        {100, 0.5, 0.05, 40, 61},  {1000, 0.5, 0.05, 469, 532},
        {1001, 0.5, 0.05, 469, 533}, {50, 0.25, 0.05, 6, 20},
        {10, 0.5, 0.10, 2, 9},
    };
    for (const auto& c : cases) {
      CAPTURE(c.n);
      CHECK(qboot::binomial_index_quantile(c.n, QuantileQuery(c.q),
                                           c.alpha / 2, Tail::lower) == c.lo);
      CHECK(qboot::binomial_index_quantile(c.n, QuantileQuery(c.q),
                                           1.0 - c.alpha / 2,
                                           Tail::upper) == c.hi);
    }
  }

  TEST_CASE("index quantiles always clamp into the sample") {
    // Extreme q pushes the raw binomial quantile to 0 or N+1.
    CHECK(qboot::binomial_index_quantile(20, QuantileQuery(0.001), 0.025,
                                         Tail::lower) == 1);
    CHECK(qboot::binomial_index_quantile(20, QuantileQuery(0.999), 0.975,
                                         Tail::upper) == 20);
  }

  TEST_CASE("binomial sampler draws the right distribution") {
    const BinomialSampler sampler(21, 0.3);
    CHECK(sampler.trials() == 21);
    RandomSource rng(12);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const int k = sampler.draw(rng);
      REQUIRE(k >= 0);
      REQUIRE(k <= 21);
      sum += k;
    }
    // mean 6.3, five sigma of the sample mean is 0.033
    CHECK(std::abs(sum / n - 6.3) < 0.033);
    CHECK_THROWS_AS(BinomialSampler(-1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(BinomialSampler(5, 0.0), std::invalid_argument);
  }
}
