#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "collapse/errors.hpp"

namespace collapse {

using CsvCell = std::variant<std::string, double, std::int64_t, std::uint64_t>;

/// Rectangular table; rows must match the header width. Doubles are written
/// with the shortest representation that round-trips (never more than 17
/// significant digits), so identical tables serialize to identical bytes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

/// Shortest round-trip decimal form of a finite double.
inline std::string format_double(double v) {
  if (!std::isfinite(v))
    throw std::invalid_argument("format_double: non-finite value");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_cell(const CsvCell& cell) {
  struct Visitor {
    std::string operator()(const std::string& s) const {
      return csv_escape(s);
    }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
  };
  return std::visit(Visitor{}, cell);
}

}  // namespace detail

inline void write_csv(const CsvTable& table, std::ostream& sink) {
  for (const auto& row : table.rows)
    if (row.size() != table.header.size())
      throw std::invalid_argument("write_csv: table is not rectangular");
  // Validate every value before emitting anything.
  for (const auto& row : table.rows)
    for (const auto& cell : row)
      if (const double* v = std::get_if<double>(&cell); v && !std::isfinite(*v))
        throw std::invalid_argument("write_csv: non-finite value in table");

  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) sink << ',';
    sink << detail::csv_escape(table.header[i]);
  }
  sink << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) sink << ',';
      sink << detail::format_cell(row[i]);
    }
    sink << '\n';
  }
  if (!sink) throw IoFailure("write_csv: sink in failed state");
}

inline void write_csv_file(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("write_csv_file: cannot open " + path);
  write_csv(table, out);
  out.flush();
  if (!out) throw IoFailure("write_csv_file: write failed for " + path);
}

}  // namespace collapse
