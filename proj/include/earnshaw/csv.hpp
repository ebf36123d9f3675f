#pragma once

// CSV tables with a leading '#' comment line for units. Numbers are written
// with 17 significant digits and never quoted; strings are always quoted, so
// parse_csv(to_csv(t)) reproduces t exactly for finite numbers.

#include <string>
#include <variant>
#include <vector>

namespace earnshaw::csv {

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> comments;  ///< emitted as "# <text>" before the header
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  bool operator==(const Table&) const = default;
};

std::string format_double(double v);
std::string to_csv(const Table& table);
/// Throws ValidationError on malformed input or ragged rows.
Table parse_csv(const std::string& text);
/// "-" writes to stdout. Throws ValidationError when the path cannot be written.
void write_csv(const Table& table, const std::string& path);

}  // namespace earnshaw::csv
