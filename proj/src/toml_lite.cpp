#include "queuenet/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>

#include "csv_util.hpp"
#include "queuenet/error.hpp"

namespace queuenet::toml {
namespace {

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

// Drops a trailing comment, honouring quoted strings.
std::string_view strip_comment(std::string_view s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return s.substr(0, i);
    }
  }
  return s;
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

class Cursor {
 public:
  Cursor(std::string_view text, int line) : s_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

  std::string string_literal() {
    const char quote = peek();
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != quote) {
      char c = s_[pos_++];
      if (c == '\\' && quote == '"') {
        if (pos_ >= s_.size()) fail("unterminated string");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  Scalar scalar() {
    const char c = peek();
    if (c == '"' || c == '\'') return string_literal();
    std::size_t end = pos_;
    while (end < s_.size() && !std::isspace(static_cast<unsigned char>(s_[end])) && s_[end] != ',' &&
           s_[end] != ']') {
      ++end;
    }
    std::string token(s_.substr(pos_, end - pos_));
    pos_ = end;
    if (token == "true") return true;
    if (token == "false") return false;
    std::string digits;
    for (char ch : token) {
      if (ch != '_') digits.push_back(ch);
    }
    std::string_view num = digits;
    if (!num.empty() && num.front() == '+') num.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (token.empty() || ec != std::errc{} || ptr != num.data() + num.size()) fail("invalid value '" + token + "'");
    return v;
  }

  Value value() {
    Value out;
    out.line = line_;
    if (peek() != '[') {
      std::visit([&](auto&& x) { out.data = x; }, scalar());
      return out;
    }
    ++pos_;
    std::vector<double> nums;
    std::vector<std::string> strs;
    while (peek() != ']') {
      if (done()) fail("unterminated array");
      Scalar item = scalar();
      if (auto* d = std::get_if<double>(&item)) {
        nums.push_back(*d);
      } else if (auto* str = std::get_if<std::string>(&item)) {
        strs.push_back(*str);
      } else {
        fail("arrays of booleans are not supported");
      }
      if (!nums.empty() && !strs.empty()) fail("mixed array element types");
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    ++pos_;
    if (!strs.empty()) {
      out.data = std::move(strs);
    } else {
      out.data = std::move(nums);
    }
    return out;
  }

  std::string key() {
    skip_ws();
    if (peek() == '"') return string_literal();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_bare_key_char(s_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

}  // namespace

const Value* Table::find(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

const Table* Document::table(const std::string& name) const {
  for (const Table& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::vector<const Table*> Document::array(const std::string& name) const {
  std::vector<const Table*> out;
  for (const Table& t : tables) {
    if (t.name == name && t.array_element) out.push_back(&t);
  }
  return out;
}

Document parse(std::istream& in) {
  Document doc;
  doc.tables.push_back(Table{"", false, 0, {}});
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const int first_line = lineno;
    std::string text(detail::trim(strip_comment(raw)));
    if (first_line == 1 && text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF) text.erase(0, 3);
    if (text.empty()) continue;

    if (text.front() == '[') {
      const bool is_array = text.size() > 1 && text[1] == '[';
      const std::size_t open = is_array ? 2 : 1;
      const std::string close = is_array ? "]]" : "]";
      if (text.size() < open + close.size() || text.compare(text.size() - close.size(), close.size(), close) != 0) {
        throw ParseError("malformed table header", lineno);
      }
      std::string name(detail::trim(std::string_view(text).substr(open, text.size() - open - close.size())));
      if (name.empty()) throw ParseError("empty table name", lineno);
      for (char c : name) {
        if (!is_bare_key_char(c)) throw ParseError("invalid table name '" + name + "'", lineno);
      }
      if (!is_array) {
        for (const Table& t : doc.tables) {
          if (t.name == name) throw ParseError("duplicate table [" + name + "]", lineno);
        }
      }
      doc.tables.push_back(Table{name, is_array, lineno, {}});
      continue;
    }

    // Continue arrays that span several lines.
    while (bracket_balance(text) > 0) {
      if (!std::getline(in, raw)) throw ParseError("unterminated array", first_line);
      ++lineno;
      text += ' ';
      text += detail::trim(strip_comment(raw));
    }

    Cursor cur(text, first_line);
    std::string key = cur.key();
    cur.expect('=');
    Value v = cur.value();
    if (!cur.done()) cur.fail("unexpected text after value of '" + key + "'");
    Table& table = doc.tables.back();
    if (table.find(key)) throw ParseError("duplicate key '" + key + "'", first_line);
    table.entries.emplace_back(std::move(key), std::move(v));
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return parse(in);
}

}  // namespace queuenet::toml
