#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qboot/bootstrap.hpp"
#include "qboot/index_pmf.hpp"
#include "qboot/simulation.hpp"

namespace qboot {

/// Output of `study index-dist`: the simulated index distribution next to
/// its binomial approximation, with their sup-norm distance.
struct IndexDistReport {
  int n_sample = 0;
  double q = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  IndexPmf empirical;
  IndexPmf binomial;
  double max_abs_diff = 0.0;
  std::optional<IndexPmf> exact;            // normalized; on request only
  std::optional<double> max_abs_diff_exact; // empirical vs exact
};

/// Serializers for the CLI. JSON renderers produce a stable key order and
/// deterministic number formatting, so identical inputs give identical
/// bytes. The pmf object uses keys {kind, support_lo, support_hi, probs,
/// normalized, diagnostics}.
std::string render_json(const ConfidenceInterval& ci);
std::string render_json(const IndexPmf& pmf);
std::string render_json(const IndexDistReport& report);
std::string render_json(const CoverageReport& report);
std::string render_json(const ApproxTable& table);
std::string render_json(const BenchReport& report);

std::string render_table(const ConfidenceInterval& ci);
std::string render_table(const IndexDistReport& report);
std::string render_table(const CoverageReport& report);
std::string render_table(const ApproxTable& table);
std::string render_table(const BenchReport& report);

}  // namespace qboot
