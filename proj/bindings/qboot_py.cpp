// Python bindings for the qboot core. Results cross the boundary as plain
// dicts/lists so callers need nothing beyond the interpreter; heavy
// computations release the GIL.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qboot/bootstrap.hpp"
#include "qboot/index_pmf.hpp"
#include "qboot/quantile.hpp"
#include "qboot/random.hpp"
#include "qboot/sample.hpp"
#include "qboot/simulation.hpp"

namespace py = pybind11;

namespace {

const char* method_name(qboot::CiMethod method) {
  return method == qboot::CiMethod::classic ? "classic" : "fast";
}

const char* kind_name(qboot::PmfKind kind) {
  switch (kind) {
    case qboot::PmfKind::exact:
      return "exact";
    case qboot::PmfKind::binomial:
      return "binomial";
    case qboot::PmfKind::empirical:
      return "empirical";
  }
  return "unknown";
}

qboot::Tail parse_tail(const std::string& tail) {
  if (tail == "lower") return qboot::Tail::lower;
  if (tail == "upper") return qboot::Tail::upper;
  throw std::invalid_argument("tail must be 'lower' or 'upper', got '" + tail +
                              "'");
}

py::dict ci_to_dict(const qboot::ConfidenceInterval& ci) {
  py::dict d;
  d["method"] = method_name(ci.method);
  d["q"] = ci.q;
  d["alpha"] = ci.alpha;
  d["nominal_level"] = ci.nominal_level;
  d["lower"] = ci.lower;
  d["upper"] = ci.upper;
  if (ci.indexes_used) {
    d["indexes_used"] =
        py::make_tuple(ci.indexes_used->first, ci.indexes_used->second);
  }
  if (ci.b_used) d["b_replications"] = *ci.b_used;
  d["seed"] = ci.seed;
  return d;
}

py::dict pmf_to_dict(const qboot::IndexPmf& pmf) {
  py::dict d;
  d["kind"] = kind_name(pmf.kind);
  d["support_lo"] = pmf.support_lo;
  d["support_hi"] = pmf.support_hi;
  d["probs"] = pmf.probs;
  d["normalized"] = pmf.normalized;
  d["empty_redraws"] = pmf.empty_redraws;
  return d;
}

// Runs fn with the GIL released; arguments and results are pure C++.
template <typename Fn>
auto unlocked(Fn&& fn) {
  py::gil_scoped_release release;
  return fn();
}

qboot::CiRequest make_request(double q, double alpha, std::uint64_t bootstrap,
                              qboot::CiMethod method, std::uint64_t seed) {
  qboot::CiRequest req{qboot::QuantileQuery(q)};
  req.alpha = alpha;
  req.b_replications = bootstrap;
  req.method = method;
  req.seed = seed;
  return req;
}

}  // namespace

PYBIND11_MODULE(_qboot, m) {
  m.doc() = "Bootstrap confidence intervals for quantiles without resampling";

  m.def(
      "quantile_estimate",
      [](std::vector<double> values, double q, std::uint64_t seed) {
        return unlocked([&] {
          const auto sample = qboot::sort_sample(std::move(values));
          qboot::RandomSource rng(seed);
          return qboot::quantile_estimate(sample, qboot::QuantileQuery(q),
                                          rng);
        });
      },
      py::arg("values"), py::arg("q"), py::kw_only(), py::arg("seed") = 0,
      "Stochastically rounded empirical quantile of a sample.");

  m.def(
      "fast_ci",
      [](std::vector<double> values, double q, double alpha) {
        const auto ci = unlocked([&] {
          const auto sample = qboot::sort_sample(std::move(values));
          return qboot::fast_ci_one_sample(
              sample, make_request(q, alpha, 0, qboot::CiMethod::fast, 0));
        });
        return ci_to_dict(ci);
      },
      py::arg("values"), py::arg("q"), py::kw_only(),
      py::arg("alpha") = 0.05,
      "Resampling-free CI for a one-sample quantile.");

  m.def(
      "classic_ci",
      [](std::vector<double> values, double q, double alpha,
         std::uint64_t bootstrap, std::uint64_t seed, unsigned threads) {
        const auto ci = unlocked([&] {
          const auto sample = qboot::sort_sample(std::move(values));
          return qboot::classic_ci_one_sample(
              sample,
              make_request(q, alpha, bootstrap, qboot::CiMethod::classic,
                           seed),
              threads);
        });
        return ci_to_dict(ci);
      },
      py::arg("values"), py::arg("q"), py::kw_only(),
      py::arg("alpha") = 0.05, py::arg("bootstrap") = 100000,
      py::arg("seed") = 0, py::arg("threads") = 1,
      "Poisson-bootstrap CI for a one-sample quantile.");

  m.def(
      "fast_ci_diff",
      [](std::vector<double> treatment, std::vector<double> control, double q,
         double alpha, std::uint64_t bootstrap, std::uint64_t seed,
         unsigned threads) {
        const auto ci = unlocked([&] {
          qboot::TwoSampleData data{qboot::sort_sample(std::move(treatment)),
                                    qboot::sort_sample(std::move(control))};
          return qboot::fast_ci_two_sample(
              data,
              make_request(q, alpha, bootstrap, qboot::CiMethod::fast, seed),
              threads);
        });
        return ci_to_dict(ci);
      },
      py::arg("treatment"), py::arg("control"), py::arg("q"), py::kw_only(),
      py::arg("alpha") = 0.05, py::arg("bootstrap") = 100000,
      py::arg("seed") = 0, py::arg("threads") = 1,
      "Index-sampled CI for a difference in quantiles.");

  m.def(
      "classic_ci_diff",
      [](std::vector<double> treatment, std::vector<double> control, double q,
         double alpha, std::uint64_t bootstrap, std::uint64_t seed,
         unsigned threads) {
        const auto ci = unlocked([&] {
          qboot::TwoSampleData data{qboot::sort_sample(std::move(treatment)),
                                    qboot::sort_sample(std::move(control))};
          return qboot::classic_ci_two_sample(
              data,
              make_request(q, alpha, bootstrap, qboot::CiMethod::classic,
                           seed),
              threads);
        });
        return ci_to_dict(ci);
      },
      py::arg("treatment"), py::arg("control"), py::arg("q"), py::kw_only(),
      py::arg("alpha") = 0.05, py::arg("bootstrap") = 100000,
      py::arg("seed") = 0, py::arg("threads") = 1,
      "Poisson-bootstrap CI for a difference in quantiles.");

  m.def(
      "conservative_empirical_quantiles",
      [](std::vector<double> estimates, double alpha) {
        const auto pair = unlocked([&] {
          return qboot::conservative_empirical_quantiles(std::move(estimates),
                                                         alpha);
        });
        return py::make_tuple(pair.first, pair.second);
      },
      py::arg("estimates"), py::arg("alpha"),
      "Conservative lower/upper empirical quantiles of a vector.");

  m.def(
      "exact_index_pmf",
      [](int n, double q, double poisson_tail_mass) {
        qboot::ExactPmfConfig cfg;
        cfg.poisson_tail_mass = poisson_tail_mass;
        const auto result = unlocked([&] {
          return qboot::exact_index_pmf(n, qboot::QuantileQuery(q), cfg);
        });
        py::dict d;
        d["raw"] = pmf_to_dict(result.raw);
        d["normalized"] = pmf_to_dict(result.normalized);
        return d;
      },
      py::arg("n"), py::arg("q"), py::kw_only(),
      py::arg("poisson_tail_mass") = 1e-12,
      "Exact distribution of the index extracted by the bootstrap quantile.");

  m.def(
      "binomial_index_pmf",
      [](int n, double q) {
        const auto pmf = unlocked(
            [&] { return qboot::binomial_index_pmf(n, qboot::QuantileQuery(q)); });
        return pmf_to_dict(pmf);
      },
      py::arg("n"), py::arg("q"),
      "Binomial(n+1, q) approximation of the index distribution.");

  m.def(
      "simulate_index_pmf",
      [](int n, double q, std::uint64_t replications, std::uint64_t seed,
         unsigned threads) {
        const auto pmf = unlocked([&] {
          qboot::RandomSource rng(seed);
          return qboot::simulate_index_pmf(n, qboot::QuantileQuery(q),
                                           replications, rng, threads);
        });
        return pmf_to_dict(pmf);
      },
      py::arg("n"), py::arg("q"), py::arg("replications"), py::kw_only(),
      py::arg("seed") = 0, py::arg("threads") = 0,
      "Empirical index distribution from a literal Poisson bootstrap.");

  m.def(
      "binomial_index_quantile",
      [](int n, double q, double p, const std::string& tail) {
        return qboot::binomial_index_quantile(n, qboot::QuantileQuery(q), p,
                                              parse_tail(tail));
      },
      py::arg("n"), py::arg("q"), py::arg("p"), py::arg("tail"),
      "Conservative index quantile of Bin(n+1, q), clamped to [1, n].");

  m.def(
      "coverage_simulation",
      [](const std::string& mode, std::size_t n_per_group,
         std::size_t replications, std::uint64_t bootstrap,
         std::vector<double> q_list, double alpha, std::uint64_t seed,
         unsigned threads, const std::string& dgp) {
        qboot::CoverageConfig cfg;
        if (mode == "one-sample") {
          cfg.mode = qboot::StudyMode::one_sample;
        } else if (mode == "two-sample") {
          cfg.mode = qboot::StudyMode::two_sample;
        } else {
          throw std::invalid_argument(
              "mode must be 'one-sample' or 'two-sample', got '" + mode + "'");
        }
        if (dgp == "standard-normal") {
          cfg.dgp = qboot::Dgp::standard_normal;
        } else if (dgp == "constant-zero") {
          cfg.dgp = qboot::Dgp::constant_zero;
        } else {
          throw std::invalid_argument(
              "dgp must be 'standard-normal' or 'constant-zero', got '" +
              dgp + "'");
        }
        cfg.n_per_group = n_per_group;
        cfg.replications = replications;
        cfg.b_replications = bootstrap;
        cfg.q_list = std::move(q_list);
        cfg.alpha = alpha;
        cfg.seed = seed;
        const auto report =
            unlocked([&] { return qboot::coverage_simulation(cfg, threads); });
        py::dict d;
        d["mode"] = mode;
        d["n_per_group"] = report.config.n_per_group;
        d["replications"] = report.config.replications;
        d["b_replications"] = report.config.b_replications;
        d["alpha"] = report.config.alpha;
        d["seed"] = report.config.seed;
        py::list rows;
        for (const auto& row : report.rows) {
          py::dict r;
          r["q"] = row.q;
          r["empirical_coverage"] = row.empirical_coverage;
          r["ci_lower"] = row.ci_lower;
          r["ci_upper"] = row.ci_upper;
          rows.append(std::move(r));
        }
        d["rows"] = std::move(rows);
        return d;
      },
      py::kw_only(), py::arg("mode") = "one-sample",
      py::arg("n_per_group") = 10000, py::arg("replications") = 2000,
      py::arg("bootstrap") = 10000,
      py::arg("q_list") = std::vector<double>{0.01, 0.1, 0.25, 0.5},
      py::arg("alpha") = 0.05, py::arg("seed") = 0, py::arg("threads") = 0,
      py::arg("dgp") = "standard-normal",
      "Monte Carlo coverage of the fast CI; dgp selects the simulated "
      "data-generating process.");

  m.def(
      "approximation_study",
      [](std::vector<int> n_list, std::vector<double> q_list,
         std::uint64_t replications, std::uint64_t seed, unsigned threads) {
        const auto table = unlocked([&] {
          qboot::RandomSource rng(seed);
          return qboot::approximation_study(n_list, q_list, replications, rng,
                                            threads);
        });
        py::dict d;
        d["n_values"] = table.n_values;
        d["q_values"] = table.q_values;
        d["max_abs_diff"] = table.max_abs_diff;
        d["replications"] = table.replications;
        d["seed"] = table.seed;
        return d;
      },
      py::arg("n_list"), py::arg("q_list"), py::arg("replications"),
      py::kw_only(), py::arg("seed") = 0, py::arg("threads") = 0,
      "Sup-norm distance between empirical and binomial index pmfs.");

  m.def(
      "bench_compare",
      [](std::size_t n_per_group, std::uint64_t bootstrap,
         std::size_t evaluations, double q, double alpha,
         bool classic_materialize, std::uint64_t seed) {
        qboot::BenchConfig cfg;
        cfg.n_per_group = n_per_group;
        cfg.b_replications = bootstrap;
        cfg.evaluations = evaluations;
        cfg.q = q;
        cfg.alpha = alpha;
        cfg.classic_materialize = classic_materialize;
        cfg.seed = seed;
        const auto report = unlocked([&] { return qboot::bench_compare(cfg); });
        py::dict d;
        d["n_per_group"] = report.config.n_per_group;
        d["b_replications"] = report.config.b_replications;
        d["evaluations"] = report.config.evaluations;
        d["q"] = report.config.q;
        d["alpha"] = report.config.alpha;
        d["classic_materialize"] = report.config.classic_materialize;
        d["seed"] = report.config.seed;
        py::list rows;
        for (const auto& row : report.rows) {
          py::dict r;
          r["method"] = row.method;
          r["min_time_ms"] = row.min_time_ms;
          r["median_time_ms"] = row.median_time_ms;
          r["max_time_ms"] = row.max_time_ms;
          if (row.total_alloc_bytes) {
            r["total_allocated_bytes"] = *row.total_alloc_bytes;
          }
          if (row.peak_extra_bytes) {
            r["peak_extra_memory_bytes"] = *row.peak_extra_bytes;
          }
          rows.append(std::move(r));
        }
        d["rows"] = std::move(rows);
        d["speedup_median"] = report.speedup_median;
        return d;
      },
      py::kw_only(), py::arg("n_per_group") = 1000,
      py::arg("bootstrap") = 10000, py::arg("evaluations") = 100,
      py::arg("q") = 0.5, py::arg("alpha") = 0.05,
      py::arg("classic_materialize") = false, py::arg("seed") = 0,
      "Times the classic and fast two-sample CI paths on identical data.");
}
