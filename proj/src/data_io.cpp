#include "qboot/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qboot {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool parse_finite(std::string_view token, double& out) {
  if (token.empty()) return false;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (*first == '+') ++first;  // from_chars rejects an explicit plus sign
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

// One CSV record into fields: double quotes wrap fields containing commas,
// and "" inside a quoted field is a literal quote. No multi-line fields.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch != '"') {
        current.push_back(ch);
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else {
        quoted = false;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

[[noreturn]] void throw_bad_lines(const std::string& name,
                                  const std::vector<std::size_t>& bad) {
  std::string msg = name + ": unparseable value on line";
  if (bad.size() > 1) msg += 's';
  msg += ' ';
  const std::size_t shown = std::min<std::size_t>(bad.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i > 0) msg += ", ";
    msg += std::to_string(bad[i]);
  }
  if (bad.size() > shown) {
    msg += " (and " + std::to_string(bad.size() - shown) + " more)";
  }
  throw std::runtime_error(msg);
}

}  // namespace

std::vector<double> read_sample(const InputSpec& spec) {
  std::ifstream file;
  std::istream* in = nullptr;
  if (spec.path == "-") {
    in = &std::cin;
  } else {
    file.open(spec.path);
    if (!file) {
      throw std::runtime_error("cannot open '" + spec.path + "' for reading");
    }
    in = &file;
  }
  const std::string name = spec.path == "-" ? "<stdin>" : spec.path;

  std::vector<double> values;
  std::vector<std::size_t> bad_lines;
  std::string line;
  std::size_t line_no = 0;

  if (spec.format == InputFormat::lines) {
    if (!std::holds_alternative<std::monostate>(spec.csv_column)) {
      throw std::invalid_argument("a column selector only applies to csv input");
    }
    while (std::getline(*in, line)) {
      ++line_no;
      const auto token = trim(line);
      if (token.empty()) continue;
      double v = 0.0;
      if (parse_finite(token, v)) {
        values.push_back(v);
      } else {
        bad_lines.push_back(line_no);
      }
    }
  } else {
    std::size_t column = 0;
    bool column_known = false;
    const std::string* wanted = std::get_if<std::string>(&spec.csv_column);
    if (const auto* index = std::get_if<std::size_t>(&spec.csv_column)) {
      column = *index;  // a numeric selector implies a headerless file
      column_known = true;
    } else if (wanted == nullptr) {
      throw std::invalid_argument(
          "csv input requires a column name or 0-based index");
    }
    while (std::getline(*in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const auto fields = split_csv(line);
      if (!column_known) {
        for (std::size_t fi = 0; fi < fields.size(); ++fi) {
          if (trim(fields[fi]) == *wanted) {
            column = fi;
            column_known = true;
            break;
          }
        }
        if (!column_known) {
          throw std::runtime_error(name + ": header has no column named '" +
                                   *wanted + "'");
        }
        continue;  // header row carries no data
      }
      double v = 0.0;
      if (column < fields.size() && parse_finite(trim(fields[column]), v)) {
        values.push_back(v);
      } else {
        bad_lines.push_back(line_no);
      }
    }
    if (!column_known) {
      throw std::runtime_error(name + ": no header row found");
    }
  }

  if (in->bad()) {
    throw std::runtime_error(name + ": read failure");
  }
  if (!bad_lines.empty()) {
    throw_bad_lines(name, bad_lines);
  }
  if (values.empty()) {
    throw std::runtime_error(name + ": no numeric data found");
  }
  return values;
}

std::string format_double(double value) {
  char buffer[32];
  const auto result =
      std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

void write_sample(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  for (const double v : values) {
    out << format_double(v) << '\n';
  }
  out.flush();
  if (!out) {
    throw std::runtime_error("write failure on '" + path + "'");
  }
}

void write_report(const std::string& rendered, const std::string& destination) {
  if (destination == "-") {
    std::cout << rendered;
    std::cout.flush();
    if (!std::cout) {
      throw std::runtime_error("write failure on standard output");
    }
    return;
  }
  std::ofstream out(destination);
  if (!out) {
    throw std::runtime_error("cannot open '" + destination + "' for writing");
  }
  out << rendered;
  out.flush();
  if (!out) {
    throw std::runtime_error("write failure on '" + destination + "'");
  }
}

}  // namespace qboot
