#pragma once
// Minimal comma-separated reading shared by the file loaders.

#include <charconv>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "queuenet/error.hpp"

namespace queuenet::detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, int line, const char* field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(std::string("field '") + field + "': not a number: '" + std::string(s) + "'", line);
  }
  return v;
}

// Reads all data rows after checking the header matches `header` exactly.
// Blank lines are skipped.
inline std::vector<std::pair<int, std::vector<std::string_view>>> read_rows(
    std::istream& in, std::string_view header, std::vector<std::string>& storage) {
  std::string line;
  int lineno = 0;
  bool have_header = false;
  storage.clear();
  std::vector<int> linenos;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!have_header) {
      std::string_view h = trim(line);
      if (h.size() >= 3 && static_cast<unsigned char>(h[0]) == 0xEF) h.remove_prefix(3);  // BOM
      if (h != header) {
        throw ParseError("expected header '" + std::string(header) + "'", lineno);
      }
      have_header = true;
      continue;
    }
    storage.push_back(line);
    linenos.push_back(lineno);
  }
  if (!have_header) throw ParseError("missing header '" + std::string(header) + "'", 0);
  std::vector<std::pair<int, std::vector<std::string_view>>> rows;
  rows.reserve(storage.size());
  for (std::size_t i = 0; i < storage.size(); ++i) rows.emplace_back(linenos[i], split_fields(storage[i]));
  return rows;
}

}  // namespace queuenet::detail
