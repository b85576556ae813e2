#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace qboot {

enum class InputFormat { lines, csv };

/// Where to read a sample from; "-" means standard input. For CSV input the
/// column is selected either by header name or by 0-based index; an index
/// implies a headerless file.
struct InputSpec {
  std::string path;
  InputFormat format = InputFormat::lines;
  std::variant<std::monostate, std::string, std::size_t> csv_column;
};

/// Reads a numeric sample in one streaming pass. Blank lines are skipped;
/// every other line (or selected CSV cell) must parse fully as a finite
/// double. Anything else throws std::runtime_error listing the offending
/// 1-based line numbers; so does an unreadable path or a file with no data.
std::vector<double> read_sample(const InputSpec& spec);

/// Writes one value per line using the shortest decimal form that parses
/// back to the same double, so a write/read cycle round-trips exactly.
void write_sample(const std::string& path, const std::vector<double>& values);

/// Writes rendered report text to a file, or to standard output when
/// destination is "-".
void write_report(const std::string& rendered, const std::string& destination);

/// Shortest round-trip decimal form of a double (what write_sample emits).
std::string format_double(double value);

}  // namespace qboot
