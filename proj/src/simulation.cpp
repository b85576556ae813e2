#include "qboot/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qboot/bootstrap.hpp"
#include "qboot/index_pmf.hpp"
#include "qboot/normal.hpp"
#include "qboot/parallel.hpp"
#include "qboot/quantile.hpp"

namespace qboot {

namespace {

const AllocProbe* g_probe = nullptr;

double dgp_quantile(Dgp dgp, double q) {
  switch (dgp) {
    case Dgp::standard_normal:
      return inverse_normal_cdf(q);
    case Dgp::constant_zero:
      return 0.0;
  }
  throw std::invalid_argument("unsupported data-generating process");
}

void fill_dgp(Dgp dgp, RandomSource& rng, std::vector<double>& out) {
  switch (dgp) {
    case Dgp::standard_normal:
      for (double& v : out) v = rng.standard_normal();
      return;
    case Dgp::constant_zero:
      std::fill(out.begin(), out.end(), 0.0);
      return;
  }
  throw std::invalid_argument("unsupported data-generating process");
}

// Decorrelated sub-seed for the CI computed at replication `rep`, quantile
// slot `qi`; the inputs are collision-free, and the mixer is a bijection.
std::uint64_t ci_seed(std::uint64_t seed, std::uint64_t rep, std::size_t n_q,
                      std::size_t qi) {
  return mix64(seed + mix64(rep * n_q + qi + 1));
}

}  // namespace

void set_alloc_probe(const AllocProbe* probe) { g_probe = probe; }
const AllocProbe* alloc_probe() { return g_probe; }

CoverageReport coverage_simulation(const CoverageConfig& cfg,
                                   unsigned threads) {
  if (cfg.n_per_group < 1) {
    throw std::invalid_argument("sample size must be positive");
  }
  if (cfg.replications < 100) {
    throw std::invalid_argument(
        "coverage study needs at least 100 replications");
  }
  if (cfg.q_list.empty()) {
    throw std::invalid_argument("quantile list must not be empty");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in the open interval (0, 1)");
  }
  const bool two_sample = cfg.mode == StudyMode::two_sample;
  if (two_sample && cfg.b_replications < 1) {
    throw std::invalid_argument("bootstrap replication count must be positive");
  }

  const std::size_t n_q = cfg.q_list.size();
  std::vector<QuantileQuery> queries;
  queries.reserve(n_q);
  for (const double q : cfg.q_list) queries.emplace_back(q);

  // Truth per quantile: the population quantile for one-sample designs, a
  // zero gap for two identically distributed groups.
  std::vector<double> truths(n_q);
  for (std::size_t qi = 0; qi < n_q; ++qi) {
    truths[qi] = two_sample ? 0.0 : dgp_quantile(cfg.dgp, cfg.q_list[qi]);
  }

  std::vector<std::vector<std::uint64_t>> chunk_hits(
      detail::kSimChunks, std::vector<std::uint64_t>(n_q, 0));

  detail::run_chunked(
      cfg.replications, detail::kSimChunks, threads,
      [&](unsigned chunk, std::uint64_t begin, std::uint64_t end) {
        auto& hits = chunk_hits[chunk];
        std::vector<double> buffer(cfg.n_per_group);
        for (std::uint64_t rep = begin; rep < end; ++rep) {
          // Stream id = replication index, so the report does not depend on
          // how replications were distributed over workers.
          RandomSource rep_rng(cfg.seed, rep);
          fill_dgp(cfg.dgp, rep_rng, buffer);
          SortedSample first = sort_sample(buffer);
          if (two_sample) {
            fill_dgp(cfg.dgp, rep_rng, buffer);
            const TwoSampleData data{std::move(first), sort_sample(buffer)};
            for (std::size_t qi = 0; qi < n_q; ++qi) {
              const CiRequest req{queries[qi], cfg.alpha, cfg.b_replications,
                                  CiMethod::fast,
                                  ci_seed(cfg.seed, rep, n_q, qi)};
              const ConfidenceInterval ci = fast_ci_two_sample(data, req, 1);
              hits[qi] += ci.lower <= truths[qi] && truths[qi] <= ci.upper;
            }
          } else {
            for (std::size_t qi = 0; qi < n_q; ++qi) {
              const CiRequest req{queries[qi], cfg.alpha, cfg.b_replications,
                                  CiMethod::fast,
                                  ci_seed(cfg.seed, rep, n_q, qi)};
              const ConfidenceInterval ci = fast_ci_one_sample(first, req);
              hits[qi] += ci.lower <= truths[qi] && truths[qi] <= ci.upper;
            }
          }
        }
      });

  CoverageReport report;
  report.config = cfg;
  report.rows.resize(n_q);
  for (std::size_t qi = 0; qi < n_q; ++qi) {
    std::uint64_t hit = 0;
    for (const auto& hits : chunk_hits) hit += hits[qi];
    const double r = static_cast<double>(cfg.replications);
    const double coverage = static_cast<double>(hit) / r;
    const double half = 1.96 * std::sqrt(coverage * (1.0 - coverage) / r);
    report.rows[qi].q = cfg.q_list[qi];
    report.rows[qi].empirical_coverage = coverage;
    report.rows[qi].ci_lower = std::max(0.0, coverage - half);
    report.rows[qi].ci_upper = std::min(1.0, coverage + half);
  }
  return report;
}

ApproxTable approximation_study(const std::vector<int>& n_list,
                                const std::vector<double>& q_list,
                                std::uint64_t replications,
                                const RandomSource& rng, unsigned threads) {
  if (n_list.empty() || q_list.empty()) {
    throw std::invalid_argument("the study grid must not be empty");
  }
  if (replications < 1) {
    throw std::invalid_argument("replication count must be positive");
  }

  ApproxTable table;
  table.n_values = n_list;
  table.q_values = q_list;
  table.replications = replications;
  table.seed = rng.seed();
  table.max_abs_diff.assign(n_list.size(),
                            std::vector<double>(q_list.size(), 0.0));
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    for (std::size_t qi = 0; qi < q_list.size(); ++qi) {
      const QuantileQuery q(q_list[qi]);
      const RandomSource cell_rng = rng.split(ni * q_list.size() + qi);
      const IndexPmf empirical =
          simulate_index_pmf(n_list[ni], q, replications, cell_rng, threads);
      table.max_abs_diff[ni][qi] =
          max_abs_pmf_diff(empirical, binomial_index_pmf(n_list[ni], q));
    }
  }
  return table;
}

namespace {

// Textbook baseline for the bench harness only: realize the complete set of
// bootstrap samples up front (the generate-everything-then-summarize
// workflow), then reduce them to quantile estimates. Exists to put a number
// on the memory the rank-based classic path avoids by never storing a
// resample.
ConfidenceInterval classic_materialize_two_sample(const TwoSampleData& data,
                                                  const CiRequest& req) {
  RandomSource stream(req.seed);
  std::uint64_t redraws = 0;
  std::vector<int> freq;

  const auto draw_arm = [&](const SortedSample& sample) {
    const std::size_t n = sample.size();
    freq.assign(n, 0);
    std::size_t total = 0;
    do {
      total = 0;
      for (std::size_t j = 0; j < n; ++j) {
        freq[j] = stream.poisson_unit();
        total += static_cast<std::size_t>(freq[j]);
      }
      if (total == 0) ++redraws;
    } while (total == 0);
    std::vector<double> boot;
    boot.reserve(total);
    for (std::size_t j = 0; j < n; ++j) {
      for (int k = 0; k < freq[j]; ++k) boot.push_back(sample.values()[j]);
    }
    return boot;
  };

  // Phase one: hold every resample of both arms in memory at once.
  std::vector<std::vector<double>> boots_t(req.b_replications);
  std::vector<std::vector<double>> boots_c(req.b_replications);
  for (std::uint64_t rep = 0; rep < req.b_replications; ++rep) {
    boots_t[rep] = draw_arm(data.treatment);
    boots_c[rep] = draw_arm(data.control);
  }

  // Phase two: reduce the stored resamples to difference estimates.
  const auto select = [&](std::vector<double>& boot) {
    const std::size_t u = g_index(req.q, boot.size(), stream);
    const auto nth = boot.begin() + static_cast<std::ptrdiff_t>(u - 1);
    std::nth_element(boot.begin(), nth, boot.end());
    return *nth;
  };
  std::vector<double> estimates(req.b_replications);
  for (std::uint64_t rep = 0; rep < req.b_replications; ++rep) {
    estimates[rep] = select(boots_t[rep]) - select(boots_c[rep]);
  }

  ConfidenceInterval ci;
  ci.nominal_level = 1.0 - req.alpha;
  ci.method = CiMethod::classic;
  ci.q = req.q.value();
  ci.alpha = req.alpha;
  ci.seed = req.seed;
  std::tie(ci.lower, ci.upper) =
      conservative_empirical_quantiles(std::move(estimates), req.alpha);
  ci.b_used = req.b_replications;
  ci.empty_redraws = redraws;
  return ci;
}

}  // namespace

BenchReport bench_compare(const BenchConfig& cfg) {
  if (cfg.n_per_group < 1) {
    throw std::invalid_argument("sample size must be positive");
  }
  if (cfg.b_replications < 1) {
    throw std::invalid_argument("bootstrap replication count must be positive");
  }
  if (cfg.evaluations < 10) {
    throw std::invalid_argument(
        "at least 10 evaluations are required for stable timings");
  }
  const QuantileQuery q(cfg.q);
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in the open interval (0, 1)");
  }

  // Shared raw inputs. Every evaluation re-sorts from the raw vectors, so
  // both methods carry identical preprocessing cost inside the timer.
  RandomSource data_rng(cfg.seed);
  std::vector<double> raw_t(cfg.n_per_group);
  std::vector<double> raw_c(cfg.n_per_group);
  for (double& v : raw_t) v = data_rng.standard_normal();
  for (double& v : raw_c) v = data_rng.standard_normal();

  const auto evaluate = [&](CiMethod method, std::uint64_t eval_seed) {
    const CiRequest req{q, cfg.alpha, cfg.b_replications, method, eval_seed};
    const TwoSampleData data{sort_sample(raw_t), sort_sample(raw_c)};
    ConfidenceInterval ci;
    if (method == CiMethod::fast) {
      ci = fast_ci_two_sample(data, req, 1);
    } else if (cfg.classic_materialize) {
      ci = classic_materialize_two_sample(data, req);
    } else {
      ci = classic_ci_two_sample(data, req, 1);
    }
    return ci.lower + ci.upper;  // observable result; keeps the work live
  };

  BenchReport report;
  report.config = cfg;
  double sink = 0.0;
  for (const CiMethod method : {CiMethod::classic, CiMethod::fast}) {
    const std::uint64_t tag = method == CiMethod::classic ? 1 : 2;
    sink += evaluate(method, mix64(cfg.seed + tag));  // warmup, untimed

    std::vector<double> times_ms(cfg.evaluations);
    for (std::size_t e = 0; e < cfg.evaluations; ++e) {
      const auto t0 = std::chrono::steady_clock::now();
      sink += evaluate(method, mix64(cfg.seed + tag + 16 * (e + 1)));
      const auto t1 = std::chrono::steady_clock::now();
      times_ms[e] =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    std::sort(times_ms.begin(), times_ms.end());

    BenchRow row;
    row.method = method == CiMethod::fast ? "fast"
                 : cfg.classic_materialize ? "classic-materialize"
                                           : "classic";
    row.min_time_ms = times_ms.front();
    row.max_time_ms = times_ms.back();
    const std::size_t mid = times_ms.size() / 2;
    row.median_time_ms = times_ms.size() % 2 == 1
                             ? times_ms[mid]
                             : 0.5 * (times_ms[mid - 1] + times_ms[mid]);

    // Memory is measured on one dedicated evaluation so the timed loop runs
    // unprobed; without an installed probe the fields stay empty.
    if (const AllocProbe* probe = g_probe) {
      probe->reset();
      const std::uint64_t baseline = probe->current_live();
      sink += evaluate(method, mix64(cfg.seed + tag + 7));
      row.total_alloc_bytes = probe->total_allocated();
      row.peak_extra_bytes = probe->peak_live() - baseline;
    }
    report.rows.push_back(std::move(row));
  }
  (void)sink;
  report.speedup_median =
      report.rows[0].median_time_ms / report.rows[1].median_time_ms;
  return report;
}

}  // namespace qboot
