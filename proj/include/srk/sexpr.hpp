#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "srk/error.hpp"

namespace srk {

/// Raw s-expression datum with its source position.
struct Sexp {
  enum class Kind { Atom, List };

  Kind kind = Kind::Atom;
  std::string atom;
  std::vector<Sexp> items;
  SourceLoc loc;

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_list() const { return kind == Kind::List; }
  bool is_atom(std::string_view text) const {
    return kind == Kind::Atom && atom == text;
  }
  // Head symbol of a non-empty list whose first item is an atom.
  std::string_view head() const {
    if (is_list() && !items.empty() && items.front().is_atom())
      return items.front().atom;
    return {};
  }
};

inline bool is_identifier_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  switch (c) {
    case '-': case '_': case '=': case '/': case '<':
    case '>': case '?': case '!': case '*':
      return true;
    default:
      return false;
  }
}

// Identifiers: letters, digits and -_=/<>?!*, not starting with a digit.
// Names beginning with '%' are reserved for compiler-generated binders
// and are only accepted when `allow_generated` is set.
inline bool is_identifier(std::string_view s, bool allow_generated = false) {
  if (s.empty()) return false;
  std::size_t start = 0;
  if (s.front() == '%') {
    if (!allow_generated || s.size() == 1) return false;
    start = 1;
  }
  if (std::isdigit(static_cast<unsigned char>(s[start]))) return false;
  for (std::size_t i = start; i < s.size(); ++i)
    if (!is_identifier_char(s[i])) return false;
  return true;
}

// Nonnegative decimal: digits, optionally followed by '.' and digits.
inline bool is_decimal(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == 0) return false;
  if (i == s.size()) return true;
  if (s[i] != '.') return false;
  std::size_t j = ++i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  return i > j && i == s.size();
}

inline bool is_natural(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

/// Reads every top-level datum in `text`. `;` starts a line comment and
/// `:` is always a token of its own.
class SexpReader {
 public:
  explicit SexpReader(std::string_view text, bool allow_generated = false)
      : text_(text), allow_generated_(allow_generated) {}

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

 private:
  SourceLoc here() const { return {line_, col_}; }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  static bool is_delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' ||
           c == ')' || c == ';' || c == ':';
  }

  Sexp read() {
    SourceLoc loc = here();
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", loc);
    if (c == '(') {
      advance();
      Sexp list;
      list.kind = Sexp::Kind::List;
      list.loc = loc;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size())
          throw ParseError("unterminated list (missing ')')", loc);
        if (text_[pos_] == ')') {
          advance();
          return list;
        }
        list.items.push_back(read());
      }
    }
    Sexp atom;
    atom.loc = loc;
    if (c == ':') {
      advance();
      atom.atom = ":";
      return atom;
    }
    while (pos_ < text_.size() && !is_delimiter(text_[pos_]))
      atom.atom.push_back(advance());
    check_atom(atom);
    return atom;
  }

  void check_atom(const Sexp& a) const {
    const std::string& s = a.atom;
    if (s == "." || s == "#t" || s == "#f" || is_decimal(s)) return;
    if (is_identifier(s, allow_generated_)) return;
    if (!s.empty() && s.front() == '%')
      throw ParseError("names starting with '%' are reserved: " + s, a.loc);
    throw ParseError("invalid token '" + s + "'", a.loc);
  }

  std::string_view text_;
  bool allow_generated_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

inline std::vector<Sexp> read_sexps(std::string_view text,
                                    bool allow_generated = false) {
  return SexpReader(text, allow_generated).read_all();
}

}  // namespace srk
