#include "earnshaw/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "earnshaw/errors.hpp"

namespace earnshaw::csv {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::pair<std::string, bool>> split_line(const std::string& line, std::size_t lineno) {
  std::vector<std::pair<std::string, bool>> fields;
  std::size_t i = 0;
  while (true) {
    std::string field;
    bool quoted = false;
    if (i < line.size() && line[i] == '"') {
      quoted = true;
      ++i;
      while (true) {
        if (i >= line.size()) throw ValidationError("unterminated quote on line " + std::to_string(lineno));
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field += line[i++];
      }
      if (i < line.size() && line[i] != ',')
        throw ValidationError("text after closing quote on line " + std::to_string(lineno));
    } else {
      while (i < line.size() && line[i] != ',') field += line[i++];
    }
    fields.emplace_back(std::move(field), quoted);
    if (i >= line.size()) break;
    ++i;  // comma
  }
  return fields;
}

Cell to_cell(const std::string& s, bool quoted, std::size_t lineno) {
  if (quoted) return s;
  if (s.empty()) throw ValidationError("empty unquoted field on line " + std::to_string(lineno));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ValidationError("not a number: '" + s + "' on line " + std::to_string(lineno));
  return v;
}

}  // namespace

std::string to_csv(const Table& t) {
  std::ostringstream out;
  for (const auto& c : t.comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (const double* d = std::get_if<double>(&row[i])) out << format_double(*d);
      else out << quote(std::get<std::string>(row[i]));
    }
    out << '\n';
  }
  return out.str();
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!have_header && line.starts_with("#")) {
      t.comments.push_back(line.starts_with("# ") ? line.substr(2) : line.substr(1));
      continue;
    }
    if (!have_header) {
      for (auto& [name, quoted] : split_line(line, lineno)) t.header.push_back(name);
      have_header = true;
      continue;
    }
    const auto fields = split_line(line, lineno);
    if (fields.size() != t.header.size()) throw ValidationError("ragged row on line " + std::to_string(lineno));
    std::vector<Cell> row;
    for (const auto& [s, quoted] : fields) row.push_back(to_cell(s, quoted, lineno));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw ValidationError("missing CSV header");
  return t;
}

void write_csv(const Table& t, const std::string& path) {
  const std::string text = to_csv(t);
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open output file: " + path);
  f << text;
  f.close();
  if (!f) throw ValidationError("failed writing output file: " + path);
}

}  // namespace earnshaw::csv
