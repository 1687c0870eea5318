#pragma once
// Reader for the subset of TOML used by scenario files: [table] and
// [[array.of.tables]] headers, bare keys, strings, numbers, booleans and
// (possibly multi-line) arrays of numbers or strings.

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace queuenet::toml {

using Scalar = std::variant<bool, double, std::string>;

struct Value {
  std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>> data;
  int line = 0;
};

struct Table {
  std::string name;  // "" for the root table
  bool array_element = false;
  int line = 0;
  std::vector<std::pair<std::string, Value>> entries;

  const Value* find(const std::string& key) const;
};

struct Document {
  std::vector<Table> tables;  // root first, then in file order

  // First table with this name, or nullptr.
  const Table* table(const std::string& name) const;
  std::vector<const Table*> array(const std::string& name) const;
};

// Throws ParseError with the offending line.
Document parse(std::istream& in);
Document parse_file(const std::string& path);

}  // namespace queuenet::toml
