// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "anisolab/errors.hpp"

namespace anisolab {

/// Shortest decimal representation that round-trips the value; the reason
/// reports are byte-stable across reruns.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_number(std::int64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Named scalar table with a metadata block and per-sweep summary scalars.
/// CSV serialization writes the header first and uses \n endings.
struct Report {
  using Cell = std::variant<double, std::int64_t, std::string>;

  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::map<std::string, double> summary;
  std::map<std::string, std::string> metadata;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw DimensionMismatch("report row width must match the header");
    rows.push_back(std::move(row));
  }

  std::string to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += columns[c];
    }
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        if (const double* d = std::get_if<double>(&row[c]))
          out += format_number(*d);
        else if (const std::int64_t* i = std::get_if<std::int64_t>(&row[c]))
          out += format_number(*i);
        else
          out += std::get<std::string>(row[c]);
      }
      out += '\n';
    }
    return out;
  }
};

}  // namespace anisolab
