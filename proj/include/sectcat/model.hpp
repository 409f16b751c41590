#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sectcat/sparse_vector.hpp"

namespace sectcat {

struct Generator {
  std::string name;
  int degree = 0;
};

/// Exponent vector over the generators of a free graded-commutative algebra,
/// read in generator order. Odd generators have exponent at most one.
struct Monomial {
  std::vector<std::uint32_t> exponents;

  auto operator<=>(const Monomial&) const = default;

  bool is_unit() const {
    for (auto e : exponents) {
      if (e) return false;
    }
    return true;
  }
  std::uint32_t word_length() const {
    std::uint32_t w = 0;
    for (auto e : exponents) w += e;
    return w;
  }
};

/// Sparse polynomial: Monomial -> coefficient, zero coefficients never stored.
using PolyElement = std::map<Monomial, Scalar>;

inline void add_term(PolyElement& p, const Monomial& m, const Scalar& c) {
  if (c == 0) return;
  auto [it, inserted] = p.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

struct ModelOptions {
  /// Permit degree-one generators (non simply connected input).
  bool allow_degree_one = false;
};

/// A free graded-commutative algebra on finitely many generators with a
/// degree +1 derivation d, d^2 = 0. Polynomial on even generators, exterior
/// on odd ones.
class SullivanModel {
 public:
  SullivanModel() = default;

  /// `differential[i]` is d of generator i. Validates degrees, homogeneity,
  /// odd-square vanishing and d^2 = 0 (checked on generators, which suffices
  /// because d^2 is itself a derivation).
  SullivanModel(std::vector<Generator> generators, std::vector<PolyElement> differential,
                ModelOptions options = {})
      : generators_(std::move(generators)), differential_(std::move(differential)), options_(options) {
    if (differential_.size() < generators_.size()) differential_.resize(generators_.size());
    if (differential_.size() != generators_.size()) {
      throw InputError("more differentials than generators");
    }
    std::set<std::string> names;
    for (const auto& g : generators_) {
      if (!names.insert(g.name).second) throw InputError("duplicate generator '" + g.name + "'");
      if (g.degree <= 0) {
        throw InputError("generator '" + g.name + "' has degree " + std::to_string(g.degree) +
                         "; degrees must be positive");
      }
      if (g.degree == 1 && !options_.allow_degree_one) {
        throw InputError("generator '" + g.name + "' has degree 1; pass the degree-one flag to allow it");
      }
    }
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      PolyElement cleaned;
      for (const auto& [m, c] : differential_[i]) {
        if (m.exponents.size() != generators_.size()) {
          throw InputError("differential of '" + generators_[i].name + "' uses a malformed monomial");
        }
        if (is_zero_monomial(m)) continue;  // odd square
        if (degree(m) != generators_[i].degree + 1) {
          throw InputError("d " + generators_[i].name + " must have degree " +
                           std::to_string(generators_[i].degree + 1) + ", found term " + format(m) +
                           " of degree " + std::to_string(degree(m)));
        }
        add_term(cleaned, m, c);
      }
      differential_[i] = std::move(cleaned);
    }
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      PolyElement dd = apply_derivation(differential_[i]);
      if (!dd.empty()) {
        throw InputError("d^2 != 0: d(d " + generators_[i].name + ") = " + format(dd));
      }
    }
  }

  const std::vector<Generator>& generators() const { return generators_; }
  std::size_t num_generators() const { return generators_.size(); }
  const PolyElement& differential(std::size_t i) const { return differential_.at(i); }
  const ModelOptions& options() const { return options_; }
  bool is_odd(std::size_t i) const { return generators_[i].degree % 2 != 0; }

  int max_generator_degree() const {
    int m = 0;
    for (const auto& g : generators_) m = std::max(m, g.degree);
    return m;
  }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      if (generators_[i].name == name) return i;
    }
    return std::nullopt;
  }

  Monomial unit() const { return Monomial{std::vector<std::uint32_t>(generators_.size(), 0)}; }
  Monomial generator_monomial(std::size_t i) const {
    Monomial m = unit();
    m.exponents.at(i) = 1;
    return m;
  }
  PolyElement one() const { return PolyElement{{unit(), Scalar(1)}}; }
  PolyElement generator_element(std::size_t i) const { return PolyElement{{generator_monomial(i), Scalar(1)}}; }

  int degree(const Monomial& m) const {
    int d = 0;
    for (std::size_t i = 0; i < m.exponents.size(); ++i) d += static_cast<int>(m.exponents[i]) * generators_[i].degree;
    return d;
  }

  bool is_zero_monomial(const Monomial& m) const {
    for (std::size_t i = 0; i < m.exponents.size(); ++i) {
      if (is_odd(i) && m.exponents[i] > 1) return true;
    }
    return false;
  }

  /// Product of monomials with its Koszul sign; nullopt when an odd generator
  /// would appear twice. Moving an odd generator of `b` past an odd generator
  /// of `a` with larger index costs a factor -1.
  std::optional<std::pair<int, Monomial>> multiply(const Monomial& a, const Monomial& b) const {
    Monomial out = a;
    int odd_in_a_after = 0;  // odd generators of a with index > current
    for (std::size_t i = 0; i < a.exponents.size(); ++i) {
      if (is_odd(i) && a.exponents[i]) ++odd_in_a_after;
    }
    int swaps = 0;
    for (std::size_t i = 0; i < b.exponents.size(); ++i) {
      if (is_odd(i) && a.exponents[i]) --odd_in_a_after;
      if (!b.exponents[i]) continue;
      out.exponents[i] += b.exponents[i];
      if (is_odd(i)) {
        if (out.exponents[i] > 1) return std::nullopt;
        swaps += odd_in_a_after;
      }
    }
    return std::make_pair(swaps % 2 ? -1 : 1, std::move(out));
  }

  PolyElement multiply(const PolyElement& a, const PolyElement& b) const {
    PolyElement out;
    for (const auto& [ma, ca] : a) {
      for (const auto& [mb, cb] : b) {
        if (auto prod = multiply(ma, mb)) add_term(out, prod->second, prod->first * ca * cb);
      }
    }
    return out;
  }

  /// Leibniz extension of d: d(f1 f2 ... fk) = sum_t (-1)^{|f1...f(t-1)|} f1..f(t-1) d(ft) f(t+1)..fk.
  PolyElement apply_derivation(const Monomial& m) const {
    std::vector<std::size_t> factors;
    for (std::size_t i = 0; i < m.exponents.size(); ++i) {
      for (std::uint32_t e = 0; e < m.exponents[i]; ++e) factors.push_back(i);
    }
    PolyElement out;
    for (std::size_t t = 0; t < factors.size(); ++t) {
      if (differential_[factors[t]].empty()) continue;
      Monomial prefix = unit();
      Monomial suffix = unit();
      int prefix_degree = 0;
      for (std::size_t s = 0; s < t; ++s) {
        ++prefix.exponents[factors[s]];
        prefix_degree += generators_[factors[s]].degree;
      }
      for (std::size_t s = t + 1; s < factors.size(); ++s) ++suffix.exponents[factors[s]];
      PolyElement term = multiply(multiply(PolyElement{{prefix, Scalar(1)}}, differential_[factors[t]]),
                                  PolyElement{{suffix, Scalar(1)}});
      Scalar sign = prefix_degree % 2 ? -1 : 1;
      for (const auto& [mm, c] : term) add_term(out, mm, sign * c);
    }
    return out;
  }

  PolyElement apply_derivation(const PolyElement& a) const {
    PolyElement out;
    for (const auto& [m, c] : a) {
      for (const auto& [mm, cc] : apply_derivation(m)) add_term(out, mm, c * cc);
    }
    return out;
  }

  /// All nonzero monomials of total degree k in canonical order:
  /// lexicographically decreasing exponent vectors (x^2 before x y before y^2).
  std::vector<Monomial> basis_in_degree(int k, int cap) const {
    if (k > cap) {
      throw InputError("basis_in_degree: degree " + std::to_string(k) + " exceeds cap " + std::to_string(cap));
    }
    std::vector<Monomial> out;
    if (k < 0) return out;
    Monomial cur = unit();
    enumerate(0, k, cur, out);
    return out;
  }

  std::string format(const Monomial& m) const {
    std::string s;
    for (std::size_t i = 0; i < m.exponents.size(); ++i) {
      if (!m.exponents[i]) continue;
      if (!s.empty()) s += ' ';
      s += generators_[i].name;
      if (m.exponents[i] > 1) s += "^" + std::to_string(m.exponents[i]);
    }
    return s.empty() ? "1" : s;
  }

  /// Text in the model-file polynomial grammar, e.g. "x^2 - 2 * x y".
  std::string format(const PolyElement& p) const {
    if (p.empty()) return "0";
    std::string s;
    bool first = true;
    // highest monomials first, matching basis order
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
      Scalar c = it->second;
      bool neg = c < 0;
      if (neg) c = -c;
      if (first) {
        if (neg) s += "-";
      } else {
        s += neg ? " - " : " + ";
      }
      first = false;
      std::string mon = format(it->first);
      if (c == 1) {
        s += mon;
      } else if (mon == "1") {
        s += c.get_str();
      } else {
        s += c.get_str() + " * " + mon;
      }
    }
    return s;
  }

 private:
  void enumerate(std::size_t i, int remaining, Monomial& cur, std::vector<Monomial>& out) const {
    if (i == generators_.size()) {
      if (remaining == 0) out.push_back(cur);
      return;
    }
    int deg = generators_[i].degree;
    int max_e = remaining / deg;
    if (is_odd(i)) max_e = std::min(max_e, 1);
    for (int e = max_e; e >= 0; --e) {
      cur.exponents[i] = static_cast<std::uint32_t>(e);
      enumerate(i + 1, remaining - e * deg, cur, out);
    }
    cur.exponents[i] = 0;
  }

  std::vector<Generator> generators_;
  std::vector<PolyElement> differential_;
  ModelOptions options_;
};

}  // namespace sectcat
