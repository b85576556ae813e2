// qboot: bootstrap confidence intervals for quantiles without resampling.
//
// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qboot/bootstrap.hpp"
#include "qboot/data_io.hpp"
#include "qboot/index_pmf.hpp"
#include "qboot/random.hpp"
#include "qboot/reports.hpp"
#include "qboot/sample.hpp"
#include "qboot/simulation.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Flags shared by every subcommand that emits a report.
struct OutputOptions {
  std::string format = "json";
  std::string destination = "-";
};

void add_output_options(CLI::App& cmd, OutputOptions& out) {
  cmd.add_option("--format", out.format, "Report format")
      ->transform(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  cmd.add_option("--output", out.destination,
                 "Write the report to this path ('-' = standard output)")
      ->capture_default_str();
}

// CLI11's Range is closed; quantiles and alpha need the open interval.
const CLI::Validator OpenUnitInterval(
    [](std::string& value) -> std::string {
      double parsed = 0.0;
      try {
        std::size_t used = 0;
        parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
      } catch (...) {
        return "'" + value + "' is not a real number";
      }
      if (!(parsed > 0.0 && parsed < 1.0)) {
        return "'" + value + "' is outside the open interval (0, 1)";
      }
      return {};
    },
    "FLOAT in (0, 1)", "open_unit_interval");

struct InputFlags {
  std::string format = "lines";
  std::string column;
  bool column_set = false;
};

qboot::InputSpec make_spec(const std::string& path, const InputFlags& flags) {
  qboot::InputSpec spec;
  spec.path = path;
  if (flags.format == "csv") {
    spec.format = qboot::InputFormat::csv;
    if (!flags.column_set) {
      throw CLI::ValidationError("--column",
                                 "csv input requires --column NAME_OR_INDEX");
    }
    // All digits = 0-based positional index into a headerless file.
    const bool numeric =
        !flags.column.empty() &&
        flags.column.find_first_not_of("0123456789") == std::string::npos;
    if (numeric) {
      spec.csv_column = static_cast<std::size_t>(std::stoull(flags.column));
    } else {
      spec.csv_column = flags.column;
    }
  } else {
    spec.format = qboot::InputFormat::lines;
    if (flags.column_set) {
      throw CLI::ValidationError("--column",
                                 "--column only applies to --input-format csv");
    }
  }
  return spec;
}

void add_input_format_options(CLI::App& cmd, InputFlags& flags) {
  cmd.add_option("--input-format", flags.format,
                 "Input layout: one value per line, or csv")
      ->transform(CLI::IsMember({"lines", "csv"}))
      ->capture_default_str();
  cmd.add_option("--column", flags.column,
                 "CSV column to read: header name, or 0-based index for "
                 "headerless files")
      ->each([&flags](const std::string&) { flags.column_set = true; });
}

void emit(const OutputOptions& out, const std::string& json,
          const std::string& table) {
  qboot::write_report(out.format == "table" ? table : json, out.destination);
}

qboot::CiMethod parse_method(const std::string& name) {
  return name == "classic" ? qboot::CiMethod::classic : qboot::CiMethod::fast;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bootstrap confidence intervals for quantiles and "
      "difference-in-quantiles, with and without resampling.\n"
      "Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error."};
  app.require_subcommand(1);
  app.get_formatter()->column_width(34);

  // ---- ci ----------------------------------------------------------------
  CLI::App* ci = app.add_subcommand(
      "ci", "Confidence intervals from data files");
  ci->require_subcommand(1);

  struct CiFlags {
    std::string input;
    std::string treatment;
    std::string control;
    InputFlags in_flags;
    double q = 0.5;
    double alpha = 0.05;
    std::string method = "fast";
    std::uint64_t bootstrap = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    OutputOptions out;
  } cif;

  const auto add_common_ci_flags = [&](CLI::App& cmd) {
    cmd.add_option("--q", cif.q, "Quantile level")
        ->check(OpenUnitInterval)
        ->capture_default_str();
    cmd.add_option("--alpha", cif.alpha, "Significance level (CI level is 1-alpha)")
        ->check(OpenUnitInterval)
        ->capture_default_str();
    cmd.add_option("--method", cif.method,
                   "fast = resampling-free; classic = Poisson bootstrap baseline")
        ->transform(CLI::IsMember({"fast", "classic"}))
        ->capture_default_str();
    cmd.add_option("--bootstrap", cif.bootstrap,
                   "Bootstrap replications (classic, and fast two-sample)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--seed", cif.seed, "RNG seed; echoed in the report")
        ->capture_default_str();
    cmd.add_option("--threads", cif.threads,
                   "Worker threads (0 = all available); never changes results")
        ->capture_default_str();
    add_input_format_options(cmd, cif.in_flags);
    add_output_options(cmd, cif.out);
  };

  CLI::App* ci_quantile = ci->add_subcommand(
      "quantile", "CI for a single-sample quantile");
  ci_quantile->add_option("--input", cif.input, "Outcome data ('-' = stdin)")
      ->required();
  add_common_ci_flags(*ci_quantile);

  CLI::App* ci_diff = ci->add_subcommand(
      "diff-quantile", "CI for a two-sample difference-in-quantiles");
  ci_diff->add_option("--treatment", cif.treatment, "Treatment-group data")
      ->required();
  ci_diff->add_option("--control", cif.control, "Control-group data")
      ->required();
  add_common_ci_flags(*ci_diff);

  // ---- study ---------------------------------------------------------------
  CLI::App* study = app.add_subcommand(
      "study", "Monte Carlo studies of the index distribution and coverage");
  study->require_subcommand(1);

  struct IndexDistFlags {
    int n = 1000;
    double q = 0.5;
    std::uint64_t replications = 1000000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool with_exact = false;
    OutputOptions out;
  } idf;

  CLI::App* index_dist = study->add_subcommand(
      "index-dist",
      "Simulated index distribution next to its binomial approximation");
  index_dist->add_option("--n", idf.n, "Sample size N")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  index_dist->add_option("--q", idf.q, "Quantile level")
      ->check(OpenUnitInterval)
      ->capture_default_str();
  index_dist
      ->add_option("--bootstrap", idf.replications,
                   "Poisson bootstrap replications to simulate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  index_dist->add_option("--seed", idf.seed, "RNG seed")
      ->capture_default_str();
  index_dist->add_option("--threads", idf.threads, "Worker threads (0 = all)")
      ->capture_default_str();
  index_dist->add_flag("--exact", idf.with_exact,
                       "Also evaluate the exact pmf (small N only)");
  add_output_options(*index_dist, idf.out);

  struct CoverageFlags {
    std::string mode = "one-sample";
    std::size_t n = 10000;
    std::uint64_t replications = 2000;
    std::uint64_t bootstrap = 10000;
    std::vector<double> q_list = {0.01, 0.1, 0.25, 0.5};
    double alpha = 0.05;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    OutputOptions out;
  } cvf;

  CLI::App* coverage = study->add_subcommand(
      "coverage", "Empirical coverage of the fast CIs against known truth");
  coverage->add_option("--mode", cvf.mode, "Study design")
      ->transform(CLI::IsMember({"one-sample", "two-sample"}))
      ->capture_default_str();
  coverage->add_option("--n", cvf.n, "Sample size per group")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  coverage
      ->add_option("--replications", cvf.replications,
                   "Monte Carlo replications (>= 100)")
      ->capture_default_str();
  coverage
      ->add_option("--bootstrap", cvf.bootstrap,
                   "Bootstrap replications inside each two-sample CI")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  coverage->add_option("--q", cvf.q_list, "Quantile levels (comma separated)")
      ->delimiter(',')
      ->check(OpenUnitInterval)
      ->capture_default_str();
  coverage->add_option("--alpha", cvf.alpha, "Significance level")
      ->check(OpenUnitInterval)
      ->capture_default_str();
  coverage->add_option("--seed", cvf.seed, "RNG seed")
      ->capture_default_str();
  coverage->add_option("--threads", cvf.threads, "Worker threads (0 = all)")
      ->capture_default_str();
  add_output_options(*coverage, cvf.out);

  struct ApproxFlags {
    std::vector<int> n_list = {100, 1000, 2000};
    std::vector<double> q_list = {0.01, 0.1, 0.25, 0.5};
    std::uint64_t replications = 1000000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    OutputOptions out;
  } apf;

  CLI::App* approx = study->add_subcommand(
      "approx-table",
      "Grid of max-abs-differences between simulated and binomial index pmfs");
  approx->add_option("--n", apf.n_list, "Sample sizes (comma separated)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  approx->add_option("--q", apf.q_list, "Quantile levels (comma separated)")
      ->delimiter(',')
      ->check(OpenUnitInterval)
      ->capture_default_str();
  approx
      ->add_option("--bootstrap", apf.replications,
                   "Poisson bootstrap replications per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  approx->add_option("--seed", apf.seed, "RNG seed")->capture_default_str();
  approx->add_option("--threads", apf.threads, "Worker threads (0 = all)")
      ->capture_default_str();
  add_output_options(*approx, apf.out);

  // ---- bench ---------------------------------------------------------------
  struct BenchFlags {
    std::size_t n = 1000;
    std::uint64_t bootstrap = 10000;
    std::size_t evaluations = 100;
    double q = 0.5;
    double alpha = 0.05;
    bool materialize = false;
    std::uint64_t seed = 0;
    OutputOptions out;
  } bf;

  CLI::App* bench = app.add_subcommand(
      "bench", "Time (and allocation) comparison of classic vs fast CIs");
  bench->add_option("--n", bf.n, "Sample size per group")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--bootstrap", bf.bootstrap, "Bootstrap replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--evaluations", bf.evaluations, "Timed evaluations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--q", bf.q, "Quantile level")
      ->check(OpenUnitInterval)
      ->capture_default_str();
  bench->add_option("--alpha", bf.alpha, "Significance level")
      ->check(OpenUnitInterval)
      ->capture_default_str();
  bench->add_flag("--materialize", bf.materialize,
                  "Run the classic side as the textbook materializing "
                  "implementation (memory baseline)");
  bench->add_option("--seed", bf.seed, "RNG seed")->capture_default_str();
  add_output_options(*bench, bf.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "qboot: usage error: " << e.what() << "\n"
              << "Run with --help for flag documentation.\n";
    return kExitUsage;
  }

  try {
    if (ci_quantile->parsed()) {
      const auto values = qboot::read_sample(make_spec(cif.input, cif.in_flags));
      const qboot::SortedSample sample = qboot::sort_sample(values);
      const qboot::CiRequest req{qboot::QuantileQuery(cif.q), cif.alpha,
                                 cif.bootstrap, parse_method(cif.method),
                                 cif.seed};
      const qboot::ConfidenceInterval result =
          req.method == qboot::CiMethod::fast
              ? qboot::fast_ci_one_sample(sample, req)
              : qboot::classic_ci_one_sample(sample, req, cif.threads);
      emit(cif.out, qboot::render_json(result), qboot::render_table(result));
    } else if (ci_diff->parsed()) {
      const qboot::TwoSampleData data{
          qboot::sort_sample(
              qboot::read_sample(make_spec(cif.treatment, cif.in_flags))),
          qboot::sort_sample(
              qboot::read_sample(make_spec(cif.control, cif.in_flags)))};
      const qboot::CiRequest req{qboot::QuantileQuery(cif.q), cif.alpha,
                                 cif.bootstrap, parse_method(cif.method),
                                 cif.seed};
      const qboot::ConfidenceInterval result =
          req.method == qboot::CiMethod::fast
              ? qboot::fast_ci_two_sample(data, req, cif.threads)
              : qboot::classic_ci_two_sample(data, req, cif.threads);
      emit(cif.out, qboot::render_json(result), qboot::render_table(result));
    } else if (index_dist->parsed()) {
      const qboot::QuantileQuery q(idf.q);
      qboot::IndexDistReport report;
      report.n_sample = idf.n;
      report.q = idf.q;
      report.replications = idf.replications;
      report.seed = idf.seed;
      report.empirical = qboot::simulate_index_pmf(
          idf.n, q, idf.replications, qboot::RandomSource(idf.seed),
          idf.threads);
      report.binomial = qboot::binomial_index_pmf(idf.n, q);
      report.max_abs_diff =
          qboot::max_abs_pmf_diff(report.empirical, report.binomial);
      if (idf.with_exact) {
        report.exact = qboot::exact_index_pmf(idf.n, q).normalized;
        report.max_abs_diff_exact =
            qboot::max_abs_pmf_diff(report.empirical, *report.exact);
      }
      emit(idf.out, qboot::render_json(report), qboot::render_table(report));
    } else if (coverage->parsed()) {
      qboot::CoverageConfig cfg;
      cfg.mode = cvf.mode == "two-sample" ? qboot::StudyMode::two_sample
                                          : qboot::StudyMode::one_sample;
      cfg.dgp = qboot::Dgp::standard_normal;
      cfg.n_per_group = cvf.n;
      cfg.replications = cvf.replications;
      cfg.b_replications = cvf.bootstrap;
      cfg.q_list = cvf.q_list;
      cfg.alpha = cvf.alpha;
      cfg.seed = cvf.seed;
      const qboot::CoverageReport report =
          qboot::coverage_simulation(cfg, cvf.threads);
      emit(cvf.out, qboot::render_json(report), qboot::render_table(report));
    } else if (approx->parsed()) {
      const qboot::ApproxTable table = qboot::approximation_study(
          apf.n_list, apf.q_list, apf.replications,
          qboot::RandomSource(apf.seed), apf.threads);
      emit(apf.out, qboot::render_json(table), qboot::render_table(table));
    } else if (bench->parsed()) {
      qboot::BenchConfig cfg;
      cfg.n_per_group = bf.n;
      cfg.b_replications = bf.bootstrap;
      cfg.evaluations = bf.evaluations;
      cfg.q = bf.q;
      cfg.alpha = bf.alpha;
      cfg.classic_materialize = bf.materialize;
      cfg.seed = bf.seed;
      const qboot::BenchReport report = qboot::bench_compare(cfg);
      emit(bf.out, qboot::render_json(report), qboot::render_table(report));
    }
  } catch (const CLI::ParseError& e) {
    // Semantic flag conflicts surfaced after parsing (e.g. --column misuse).
    std::cerr << "qboot: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "qboot: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitSuccess;
}
