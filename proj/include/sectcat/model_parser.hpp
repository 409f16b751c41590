#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "sectcat/model.hpp"

namespace sectcat {

/// A syntax or validation error at a source position (1-based; column 0
/// when the error concerns a whole line).
class ParseError : public InputError {
 public:
  ParseError(int line, int column, const std::string& what)
      : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct SourcePosition {
  int line = 0;
  int column = 0;
};

/// A parsed model file: the model plus where each declaration came from.
struct ModelFile {
  SullivanModel model;
  std::vector<SourcePosition> generator_positions;                 // by generator index
  std::vector<std::optional<SourcePosition>> differential_positions;  // by generator index
};

namespace detail {

inline bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class LineScanner {
 public:
  LineScanner(const std::string& text, int line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  int column() const { return static_cast<int>(pos_) + 1; }
  /// Column of the next token.
  int token_column() {
    skip_space();
    return column();
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, column(), what); }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'" + found());
  }
  std::string name() {
    skip_space();
    if (pos_ >= text_.size() || !name_start(text_[pos_])) fail("expected a name" + found());
    std::size_t start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }
  /// Unsigned integer or p/q, without sign.
  std::string number() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a number" + found());
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      std::size_t den = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == den) fail("expected a denominator after '/'");
    }
    return text_.substr(start, pos_ - start);
  }
  long integer() {
    skip_space();
    bool neg = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) neg = text_[pos_++] == '-';
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected an integer" + found());
    if (pos_ - start > 9) fail("integer too large");
    long v = std::stol(text_.substr(start, pos_ - start));
    return neg ? -v : v;
  }
  bool next_is_digit() { return std::isdigit(static_cast<unsigned char>(peek())) != 0; }
  bool next_is_name() { return name_start(peek()); }

 private:
  std::string found() {
    skip_space();
    if (pos_ >= text_.size()) return ", found end of line";
    return std::string(", found '") + text_[pos_] + "'";
  }

  const std::string& text_;
  int line_;
  std::size_t pos_ = 0;
};

struct RawLine {
  int number;
  std::string text;  // comment stripped
};

}  // namespace detail

/// Parses the model grammar:
///
///   generator <name> <degree>
///   d <name> = <poly>
///
/// with poly a sum of terms `coef * mon` or `mon`, coef an integer or p/q,
/// mon a product `g1^e1 g2^e2 ...` (`^1` optional), and `#` starting a
/// comment. Generators may be declared in any order relative to the `d`
/// lines; omitted `d` lines mean d = 0. Validation (degrees, homogeneity,
/// d^2 = 0) happens here, with source positions.
inline ModelFile parse_model(const std::string& text, ModelOptions options = {}) {
  std::vector<detail::RawLine> lines;
  {
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      std::string line = text.substr(start, end - start);
      ++number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      lines.push_back({number, line});
      start = end + 1;
    }
  }

  // pass 1: generators
  std::vector<Generator> gens;
  std::vector<SourcePosition> gen_pos;
  for (const auto& l : lines) {
    detail::LineScanner s(l.text, l.number);
    if (s.at_end()) continue;
    const int kw_col = s.column();
    std::string kw = s.name();
    if (kw == "generator") {
      const int name_col = s.token_column();
      std::string name = s.name();
      const int deg_col = s.token_column();
      long deg = s.integer();
      if (!s.at_end()) s.fail("unexpected text after the degree");
      if (deg <= 0) {
        throw ParseError(l.number, deg_col,
                         "generator '" + name + "' has degree " + std::to_string(deg) + "; degrees must be positive");
      }
      if (deg == 1 && !options.allow_degree_one) {
        throw ParseError(l.number, deg_col,
                         "generator '" + name + "' has degree 1; pass --flag-degree-one to allow it");
      }
      for (std::size_t i = 0; i < gens.size(); ++i) {
        if (gens[i].name == name) {
          throw ParseError(l.number, name_col,
                           "duplicate generator '" + name + "' (first declared on line " +
                               std::to_string(gen_pos[i].line) + ")");
        }
      }
      gens.push_back({name, static_cast<int>(deg)});
      gen_pos.push_back({l.number, kw_col});
    } else if (kw != "d") {
      throw ParseError(l.number, kw_col, "expected 'generator' or 'd', found '" + kw + "'");
    }
  }

  SullivanModel shape(gens, {}, ModelOptions{true});
  std::vector<PolyElement> diffs(gens.size());
  std::vector<std::optional<SourcePosition>> d_pos(gens.size());

  // pass 2: differentials
  for (const auto& l : lines) {
    detail::LineScanner s(l.text, l.number);
    if (s.at_end()) continue;
    const int kw_col = s.column();
    if (s.name() != "d") continue;
    const int target_col = s.token_column();
    std::string target = s.name();
    auto idx = shape.find(target);
    if (!idx) throw ParseError(l.number, target_col, "unknown generator '" + target + "'");
    if (d_pos[*idx]) {
      throw ParseError(l.number, kw_col,
                       "second differential for '" + target + "' (first on line " +
                           std::to_string(d_pos[*idx]->line) + ")");
    }
    d_pos[*idx] = SourcePosition{l.number, kw_col};
    s.expect('=');
    const int want = gens[*idx].degree + 1;
    PolyElement poly;
    bool first = true;
    while (true) {
      Scalar sign(1);
      if (s.accept('-')) {
        sign = -1;
      } else if (!s.accept('+') && !first) {
        s.fail("expected '+' or '-' between terms");
      }
      if (s.at_end()) s.fail("expected a term");
      const int term_col = s.token_column();
      Scalar coef(1);
      Monomial mon = shape.unit();
      bool has_mon = true;
      if (s.next_is_digit()) {
        coef = parse_scalar(s.number());
        if (s.accept('*')) {
          if (!s.next_is_name()) s.fail("expected a monomial after '*'");
        } else {
          if (s.next_is_name()) s.fail("expected '*' between coefficient and monomial");
          has_mon = false;
        }
      }
      if (has_mon) {
        // resolve names here so unknown generators get a position
        do {
          const int g_col = s.token_column();
          std::string g = s.name();
          auto gi = shape.find(g);
          if (!gi) throw ParseError(l.number, g_col, "unknown generator '" + g + "'");
          long e = 1;
          if (s.accept('^')) {
            e = s.integer();
            if (e < 1) s.fail("exponent must be positive");
          }
          mon.exponents[*gi] += static_cast<std::uint32_t>(e);
        } while (s.next_is_name());
      }
      if (coef != 0 && !shape.is_zero_monomial(mon)) {
        const int deg = shape.degree(mon);
        if (deg != want) {
          throw ParseError(l.number, term_col,
                           "d " + target + " must have degree " + std::to_string(want) + ", term " +
                               shape.format(mon) + " has degree " + std::to_string(deg));
        }
      }
      if (!shape.is_zero_monomial(mon)) add_term(poly, mon, sign * coef);
      first = false;
      if (s.at_end()) break;
    }
    diffs[*idx] = std::move(poly);
  }

  try {
    SullivanModel model(gens, diffs, options);
    return ModelFile{std::move(model), std::move(gen_pos), std::move(d_pos)};
  } catch (const InputError& e) {
    // attribute d^2 failures to the offending differential line
    const std::string msg = e.what();
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (d_pos[i] && msg.find("d(d " + gens[i].name + ")") != std::string::npos) {
        throw ParseError(d_pos[i]->line, d_pos[i]->column, msg);
      }
    }
    throw;
  }
}

/// Text in the model grammar; parse_model(emit_model(m)) reproduces m.
inline std::string emit_model(const SullivanModel& m) {
  std::string out;
  for (const auto& g : m.generators()) out += "generator " + g.name + " " + std::to_string(g.degree) + "\n";
  for (std::size_t i = 0; i < m.num_generators(); ++i) {
    if (m.differential(i).empty()) continue;
    out += "d " + m.generators()[i].name + " = " + m.format(m.differential(i)) + "\n";
  }
  return out;
}

}  // namespace sectcat
