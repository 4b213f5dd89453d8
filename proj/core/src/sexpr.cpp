#include "covgen/sexpr.hpp"

#include <cctype>
#include <stdexcept>

namespace covgen {

namespace {

bool delim(char c) { return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')'; }

// Skips blanks and comments from `i`; returns the new position.
std::size_t skip(std::string_view s, std::size_t i) {
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    } else if (s[i] == ';') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else {
      break;
    }
  }
  return i;
}

// End of a quoted token starting at i, or npos if unterminated.
std::size_t quoted_end(std::string_view s, std::size_t i) {
  const char q = s[i];
  for (std::size_t j = i + 1; j < s.size(); ++j) {
    if (s[j] != q) continue;
    if (q == '"' && j + 1 < s.size() && s[j + 1] == '"') {
      ++j;
      continue;
    }
    return j + 1;
  }
  return std::string_view::npos;
}

SExpr read(std::string_view s, std::size_t& i) {
  i = skip(s, i);
  if (i >= s.size()) throw std::invalid_argument("unexpected end of s-expression");
  if (s[i] == ')') throw std::invalid_argument("unexpected ')'");
  SExpr e;
  if (s[i] == '(') {
    e.atom = false;
    ++i;
    for (;;) {
      i = skip(s, i);
      if (i >= s.size()) throw std::invalid_argument("unterminated list");
      if (s[i] == ')') {
        ++i;
        return e;
      }
      e.items.push_back(read(s, i));
    }
  }
  if (s[i] == '"' || s[i] == '|') {
    std::size_t end = quoted_end(s, i);
    if (end == std::string_view::npos) throw std::invalid_argument("unterminated literal");
    e.text = std::string(s.substr(i, end - i));
    if (e.text.front() == '|') e.text = e.text.substr(1, e.text.size() - 2);
    i = end;
    return e;
  }
  std::size_t start = i;
  while (i < s.size() && !delim(s[i]) && s[i] != ';') ++i;
  e.text = std::string(s.substr(start, i - start));
  return e;
}

}  // namespace

std::string SExpr::str() const {
  if (atom) return text;
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i].str();
  }
  return out + ")";
}

std::optional<std::size_t> complete_sexpr(std::string_view buf) {
  std::size_t i = skip(buf, 0);
  if (i >= buf.size()) return std::nullopt;
  int depth = 0;
  while (i < buf.size()) {
    char c = buf[i];
    if (c == '"' || c == '|') {
      std::size_t end = quoted_end(buf, i);
      if (end == std::string_view::npos) return std::nullopt;
      i = end;
      if (depth == 0) return i;
      continue;
    }
    if (c == ';' && depth > 0) {
      while (i < buf.size() && buf[i] != '\n') ++i;
      continue;
    }
    if (c == '(') {
      ++depth;
      ++i;
    } else if (c == ')') {
      --depth;
      ++i;
      if (depth <= 0) return i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else {
      std::size_t start = i;
      while (i < buf.size() && !delim(buf[i])) ++i;
      if (depth == 0) {
        if (i == buf.size()) return std::nullopt;
        return i;
      }
      if (i == start) ++i;
    }
  }
  return std::nullopt;
}

SExpr parse_sexpr(std::string_view text) {
  std::size_t i = 0;
  SExpr e = read(text, i);
  if (skip(text, i) != text.size()) throw std::invalid_argument("trailing input after s-expression");
  return e;
}

}  // namespace covgen
