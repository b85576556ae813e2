#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qboot/random.hpp"

namespace qboot {

enum class Dgp {
  standard_normal,
  constant_zero,  // degenerate test hook; not exposed on the CLI
};

enum class StudyMode { one_sample, two_sample };

/// Monte Carlo coverage study design. Fresh samples per replication; the
/// fast CI method is evaluated against the known population truth.
struct CoverageConfig {
  std::size_t n_per_group = 10000;
  std::size_t replications = 2000;
  std::uint64_t b_replications = 10000;
  std::vector<double> q_list = {0.01, 0.1, 0.25, 0.5};
  double alpha = 0.05;
  Dgp dgp = Dgp::standard_normal;
  StudyMode mode = StudyMode::one_sample;
  std::uint64_t seed = 0;
};

struct CoverageRow {
  double q = 0.0;
  double empirical_coverage = 0.0;
  double ci_lower = 0.0;  // normal-approximation CI of the proportion
  double ci_upper = 0.0;
};

struct CoverageReport {
  CoverageConfig config;
  std::vector<CoverageRow> rows;
};

/// Runs the coverage study. Replication r uses stream id r of the config
/// seed and its own derived CI seeds, so reports are byte-identical for any
/// thread count.
CoverageReport coverage_simulation(const CoverageConfig& cfg,
                                   unsigned threads = 0);

/// Grid of sup-norm distances between the empirical index distribution and
/// its binomial approximation, one cell per (N, q).
struct ApproxTable {
  std::vector<int> n_values;
  std::vector<double> q_values;
  std::vector<std::vector<double>> max_abs_diff;  // [n][q]
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
};

ApproxTable approximation_study(const std::vector<int>& n_list,
                                const std::vector<double>& q_list,
                                std::uint64_t replications,
                                const RandomSource& rng, unsigned threads = 0);

/// Wall-clock (and, when an allocation probe is installed, memory)
/// comparison of the classic and fast two-sample CI algorithms on identical
/// data. Both run single-threaded for a like-for-like complexity comparison.
struct BenchConfig {
  std::size_t n_per_group = 1000;
  std::uint64_t b_replications = 10000;
  std::size_t evaluations = 100;
  std::uint64_t seed = 0;
  double q = 0.5;
  double alpha = 0.05;
  bool classic_materialize = false;  // realize bootstrap vectors, as a
                                     // memory baseline
};

struct BenchRow {
  std::string method;
  double min_time_ms = 0.0;
  double median_time_ms = 0.0;
  double max_time_ms = 0.0;
  std::optional<std::uint64_t> total_alloc_bytes;  // cumulative, per evaluation
  std::optional<std::uint64_t> peak_extra_bytes;   // peak live minus baseline
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchRow> rows;  // classic first, then fast
  double speedup_median = 0.0;
};

BenchReport bench_compare(const BenchConfig& cfg);

/// Allocation probe registry. Binaries that link the allocation tracker
/// install a probe at startup; without one, bench memory fields stay empty.
struct AllocProbe {
  void (*reset)();
  std::uint64_t (*total_allocated)();
  std::uint64_t (*current_live)();
  std::uint64_t (*peak_live)();
};

void set_alloc_probe(const AllocProbe* probe);
const AllocProbe* alloc_probe();

}  // namespace qboot
