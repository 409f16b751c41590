#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sectcat {

/// Exact rational scalar. GMP keeps every value in lowest terms with a
/// positive denominator.
using Scalar = mpq_class;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string to_string(const Scalar& s) { return s.get_str(); }

/// Parses "p", "-p" or "p/q". Throws InputError on malformed text.
inline Scalar parse_scalar(const std::string& text) {
  Scalar s;
  if (text.empty() || s.set_str(text, 10) != 0) {
    throw InputError("malformed rational '" + text + "'");
  }
  if (s.get_den() == 0) throw InputError("zero denominator in '" + text + "'");
  s.canonicalize();
  return s;
}

/// Sparse vector of rationals, entries sorted by index, no explicit zeros.
class SparseVector {
 public:
  using Entry = std::pair<std::size_t, Scalar>;

  SparseVector() = default;
  SparseVector(std::initializer_list<Entry> entries) {
    for (const auto& [i, v] : entries) add_to(i, v);
  }

  static SparseVector unit(std::size_t i) {
    SparseVector v;
    v.entries_.emplace_back(i, Scalar(1));
    return v;
  }

  static SparseVector from_dense(const std::vector<Scalar>& dense) {
    SparseVector v;
    for (std::size_t i = 0; i < dense.size(); ++i) {
      if (dense[i] != 0) v.entries_.emplace_back(i, dense[i]);
    }
    return v;
  }

  std::vector<Scalar> to_dense(std::size_t n) const {
    std::vector<Scalar> out(n);
    for (const auto& [i, v] : entries_) {
      if (i >= n) throw std::out_of_range("sparse index beyond dense size");
      out[i] = v;
    }
    return out;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  std::size_t nonzeros() const { return entries_.size(); }
  std::size_t lead() const { return entries_.front().first; }
  std::size_t max_index() const { return entries_.back().first; }

  Scalar get(std::size_t i) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, std::size_t k) { return e.first < k; });
    if (it != entries_.end() && it->first == i) return it->second;
    return Scalar(0);
  }

  void add_to(std::size_t i, const Scalar& value) {
    if (value == 0) return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, std::size_t k) { return e.first < k; });
    if (it != entries_.end() && it->first == i) {
      it->second += value;
      if (it->second == 0) entries_.erase(it);
    } else {
      entries_.insert(it, Entry(i, value));
    }
  }

  /// this += factor * other
  void axpy(const Scalar& factor, const SparseVector& other) {
    if (factor == 0 || other.entries_.empty()) return;
    std::vector<Entry> merged;
    merged.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
      if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
        merged.push_back(std::move(*a));
        ++a;
      } else if (a == entries_.end() || b->first < a->first) {
        merged.emplace_back(b->first, factor * b->second);
        ++b;
      } else {
        Scalar s = a->second + factor * b->second;
        if (s != 0) merged.emplace_back(a->first, std::move(s));
        ++a;
        ++b;
      }
    }
    entries_ = std::move(merged);
  }

  void scale(const Scalar& factor) {
    if (factor == 0) {
      entries_.clear();
      return;
    }
    for (auto& e : entries_) e.second *= factor;
  }

  /// Re-indexes entries through `map` (entries mapped to npos are dropped).
  template <class F>
  SparseVector remapped(F&& map) const {
    SparseVector out;
    for (const auto& [i, v] : entries_) {
      std::size_t j = map(i);
      if (j != static_cast<std::size_t>(-1)) out.add_to(j, v);
    }
    return out;
  }

  Scalar dot(const SparseVector& other) const {
    Scalar s = 0;
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() && b != other.entries_.end()) {
      if (a->first < b->first) {
        ++a;
      } else if (b->first < a->first) {
        ++b;
      } else {
        s += a->second * b->second;
        ++a;
        ++b;
      }
    }
    return s;
  }

  friend SparseVector operator+(SparseVector a, const SparseVector& b) {
    a.axpy(1, b);
    return a;
  }
  friend SparseVector operator-(SparseVector a, const SparseVector& b) {
    a.axpy(-1, b);
    return a;
  }
  friend SparseVector operator*(const Scalar& s, SparseVector a) {
    a.scale(s);
    return a;
  }
  friend bool operator==(const SparseVector& a, const SparseVector& b) {
    return a.entries_ == b.entries_;
  }

  std::string str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [i, v] : entries_) {
      if (!first) os << ", ";
      first = false;
      os << i << ":" << v.get_str();
    }
    os << "}";
    return os.str();
  }

 private:
  std::vector<Entry> entries_;
};

}  // namespace sectcat
