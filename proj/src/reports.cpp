#include "qboot/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"

namespace qboot {

namespace {

// Insertion-ordered objects plus nlohmann's shortest-round-trip number
// serialization give byte-stable output for identical inputs.
using Json = nlohmann::ordered_json;

const char* method_name(CiMethod method) {
  return method == CiMethod::classic ? "classic" : "fast";
}

const char* kind_name(PmfKind kind) {
  switch (kind) {
    case PmfKind::exact:
      return "exact";
    case PmfKind::binomial:
      return "binomial";
    case PmfKind::empirical:
      return "empirical";
  }
  return "unknown";
}

const char* dgp_name(Dgp dgp) {
  switch (dgp) {
    case Dgp::standard_normal:
      return "standard_normal";
    case Dgp::constant_zero:
      return "constant_zero";
  }
  return "unknown";
}

const char* mode_name(StudyMode mode) {
  return mode == StudyMode::two_sample ? "two-sample" : "one-sample";
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json pmf_to_json(const IndexPmf& pmf) {
  Json j;
  j["kind"] = kind_name(pmf.kind);
  j["support_lo"] = pmf.support_lo;
  j["support_hi"] = pmf.support_hi;
  j["probs"] = pmf.probs;
  j["normalized"] = pmf.normalized;
  j["diagnostics"] = Json{{"empty_redraws", pmf.empty_redraws}};
  return j;
}

Json ci_to_json(const ConfidenceInterval& ci) {
  Json j;
  j["report"] = "confidence_interval";
  j["method"] = method_name(ci.method);
  j["q"] = ci.q;
  j["alpha"] = ci.alpha;
  j["nominal_level"] = ci.nominal_level;
  j["lower"] = ci.lower;
  j["upper"] = ci.upper;
  if (ci.indexes_used) {
    j["indexes_used"] =
        Json{{"lower", ci.indexes_used->first}, {"upper", ci.indexes_used->second}};
  }
  if (ci.b_used) {
    j["b_replications"] = *ci.b_used;
  }
  j["seed"] = ci.seed;
  return j;
}

std::string formatted(const char* fmt, double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, fmt, v);
  return buffer;
}

}  // namespace

std::string render_json(const ConfidenceInterval& ci) {
  return dump(ci_to_json(ci));
}

std::string render_json(const IndexPmf& pmf) { return dump(pmf_to_json(pmf)); }

std::string render_json(const IndexDistReport& report) {
  Json j;
  j["report"] = "index_dist";
  j["n"] = report.n_sample;
  j["q"] = report.q;
  j["replications"] = report.replications;
  j["seed"] = report.seed;
  j["empirical"] = pmf_to_json(report.empirical);
  j["binomial"] = pmf_to_json(report.binomial);
  j["max_abs_diff"] = report.max_abs_diff;
  if (report.exact) {
    j["exact"] = pmf_to_json(*report.exact);
  }
  if (report.max_abs_diff_exact) {
    j["max_abs_diff_exact"] = *report.max_abs_diff_exact;
  }
  return dump(j);
}

std::string render_json(const CoverageReport& report) {
  const CoverageConfig& cfg = report.config;
  Json config;
  config["mode"] = mode_name(cfg.mode);
  config["dgp"] = dgp_name(cfg.dgp);
  config["normal_method"] = "polar";
  config["n_per_group"] = cfg.n_per_group;
  config["replications"] = cfg.replications;
  config["b_replications"] = cfg.b_replications;
  config["q_list"] = cfg.q_list;
  config["alpha"] = cfg.alpha;
  config["seed"] = cfg.seed;

  Json rows = Json::array();
  for (const CoverageRow& row : report.rows) {
    Json r;
    r["q"] = row.q;
    r["empirical_coverage"] = row.empirical_coverage;
    r["ci_lower"] = row.ci_lower;
    r["ci_upper"] = row.ci_upper;
    rows.push_back(std::move(r));
  }

  Json j;
  j["report"] = "coverage";
  j["config"] = std::move(config);
  j["rows"] = std::move(rows);
  return dump(j);
}

std::string render_json(const ApproxTable& table) {
  Json j;
  j["report"] = "approx_table";
  j["n_values"] = table.n_values;
  j["q_values"] = table.q_values;
  j["replications"] = table.replications;
  j["seed"] = table.seed;
  j["max_abs_diff"] = table.max_abs_diff;
  return dump(j);
}

std::string render_json(const BenchReport& report) {
  const BenchConfig& cfg = report.config;
  Json config;
  config["n_per_group"] = cfg.n_per_group;
  config["b_replications"] = cfg.b_replications;
  config["evaluations"] = cfg.evaluations;
  config["q"] = cfg.q;
  config["alpha"] = cfg.alpha;
  config["classic_materialize"] = cfg.classic_materialize;
  config["seed"] = cfg.seed;

  Json rows = Json::array();
  for (const BenchRow& row : report.rows) {
    Json r;
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
    rows.push_back(std::move(r));
  }

  Json j;
  j["report"] = "bench";
  j["config"] = std::move(config);
  j["rows"] = std::move(rows);
  j["speedup_median"] = report.speedup_median;
  return dump(j);
}

std::string render_table(const ConfidenceInterval& ci) {
  std::ostringstream out;
  out << "confidence interval\n";
  out << "  method           " << method_name(ci.method) << '\n';
  out << "  q                " << formatted("%.6g", ci.q) << '\n';
  out << "  alpha            " << formatted("%.6g", ci.alpha) << '\n';
  out << "  nominal level    " << formatted("%.6g", ci.nominal_level) << '\n';
  out << "  lower            " << formatted("%.10g", ci.lower) << '\n';
  out << "  upper            " << formatted("%.10g", ci.upper) << '\n';
  if (ci.indexes_used) {
    out << "  indexes used     " << ci.indexes_used->first << " .. "
        << ci.indexes_used->second << '\n';
  }
  if (ci.b_used) {
    out << "  b replications   " << *ci.b_used << '\n';
  }
  out << "  seed             " << ci.seed << '\n';
  return out.str();
}

std::string render_table(const IndexDistReport& report) {
  std::ostringstream out;
  out << "index distribution, N=" << report.n_sample << " q="
      << formatted("%.6g", report.q) << '\n';
  out << "  replications     " << report.replications << '\n';
  out << "  seed             " << report.seed << '\n';
  out << "  empty redraws    " << report.empirical.empty_redraws << '\n';
  out << "  max abs diff     " << formatted("%.6g", report.max_abs_diff)
      << '\n';
  if (report.max_abs_diff_exact) {
    out << "  max abs diff (exact)  "
        << formatted("%.6g", *report.max_abs_diff_exact) << '\n';
  }
  out << '\n';
  out << "  index   empirical      binomial";
  if (report.exact) out << "       exact";
  out << '\n';
  const int lo = std::min(report.empirical.support_lo,
                          report.binomial.support_lo);
  const int hi = std::max(report.empirical.support_hi,
                          report.binomial.support_hi);
  for (int i = lo; i <= hi; ++i) {
    char line[128];
    std::snprintf(line, sizeof line, "  %5d   %.10f   %.10f", i,
                  report.empirical.prob_at(i), report.binomial.prob_at(i));
    out << line;
    if (report.exact) {
      out << "   " << formatted("%.10f", report.exact->prob_at(i));
    }
    out << '\n';
  }
  return out.str();
}

std::string render_table(const CoverageReport& report) {
  const CoverageConfig& cfg = report.config;
  std::ostringstream out;
  out << "coverage study (" << mode_name(cfg.mode) << ", " << dgp_name(cfg.dgp)
      << ")\n";
  out << "  n per group      " << cfg.n_per_group << '\n';
  out << "  replications     " << cfg.replications << '\n';
  out << "  b replications   " << cfg.b_replications << '\n';
  out << "  alpha            " << formatted("%.6g", cfg.alpha) << '\n';
  out << "  seed             " << cfg.seed << '\n';
  out << '\n';
  out << "      q   coverage   ci_lower   ci_upper\n";
  for (const CoverageRow& row : report.rows) {
    char line[128];
    std::snprintf(line, sizeof line, "  %5.3g   %8.4f   %8.4f   %8.4f\n",
                  row.q, row.empirical_coverage, row.ci_lower, row.ci_upper);
    out << line;
  }
  return out.str();
}

std::string render_table(const ApproxTable& table) {
  std::ostringstream out;
  out << "binomial approximation error (max abs pmf difference)\n";
  out << "  replications     " << table.replications << '\n';
  out << "  seed             " << table.seed << '\n';
  out << '\n';
  out << "        N";
  for (const double q : table.q_values) {
    char cell[32];
    std::snprintf(cell, sizeof cell, "   q=%-7.4g", q);
    out << cell;
  }
  out << '\n';
  for (std::size_t ni = 0; ni < table.n_values.size(); ++ni) {
    char head[32];
    std::snprintf(head, sizeof head, "  %7d", table.n_values[ni]);
    out << head;
    for (std::size_t qi = 0; qi < table.q_values.size(); ++qi) {
      char cell[32];
      std::snprintf(cell, sizeof cell, "   %9.5f",
                    table.max_abs_diff[ni][qi]);
      out << cell;
    }
    out << '\n';
  }
  return out.str();
}

std::string render_table(const BenchReport& report) {
  const BenchConfig& cfg = report.config;
  std::ostringstream out;
  out << "bench: classic vs fast two-sample CI\n";
  out << "  n per group      " << cfg.n_per_group << '\n';
  out << "  b replications   " << cfg.b_replications << '\n';
  out << "  evaluations      " << cfg.evaluations << '\n';
  out << "  q                " << formatted("%.6g", cfg.q) << '\n';
  out << "  classic mode     "
      << (cfg.classic_materialize ? "materialize" : "rank-based") << '\n';
  out << "  seed             " << cfg.seed << '\n';
  out << '\n';
  out << "  method    min_ms      median_ms   max_ms      alloc_bytes    peak_extra_bytes\n";
  for (const BenchRow& row : report.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-8s  %-10.4f  %-10.4f  %-10.4f",
                  row.method.c_str(), row.min_time_ms, row.median_time_ms,
                  row.max_time_ms);
    out << line;
    if (row.total_alloc_bytes) {
      char mem[64];
      std::snprintf(mem, sizeof mem, "  %-13llu",
                    static_cast<unsigned long long>(*row.total_alloc_bytes));
      out << mem;
    } else {
      out << "  -            ";
    }
    if (row.peak_extra_bytes) {
      out << ' '
          << static_cast<unsigned long long>(*row.peak_extra_bytes);
    } else {
      out << " -";
    }
    out << '\n';
  }
  out << '\n';
  out << "  median speedup (classic/fast): "
      << formatted("%.2f", report.speedup_median) << '\n';
  return out.str();
}

}  // namespace qboot
