#pragma once

#include <map>
#include <string>
#include <vector>

#include "sectcat/linalg.hpp"

namespace sectcat {

/// Degreewise bases of a graded vector space, stored on an integer window
/// [low, high]. Degrees outside the window have dimension zero.
class GradedVectorSpace {
 public:
  GradedVectorSpace() = default;
  GradedVectorSpace(int low, std::vector<std::vector<std::string>> labels)
      : low_(low), labels_(std::move(labels)) {}

  int low() const { return low_; }
  int high() const { return low_ + static_cast<int>(labels_.size()) - 1; }
  bool stores(int k) const { return k >= low_ && k <= high(); }

  std::size_t dim(int k) const { return stores(k) ? labels_[k - low_].size() : 0; }
  const std::vector<std::string>& labels(int k) const {
    static const std::vector<std::string> empty;
    return stores(k) ? labels_[k - low_] : empty;
  }
  std::string label(int k, std::size_t i) const { return labels(k).at(i); }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> out;
    for (const auto& l : labels_) out.push_back(l.size());
    return out;
  }

 private:
  int low_ = 0;
  std::vector<std::vector<std::string>> labels_;
};

/// A linear map of fixed degree between graded spaces: block(k) sends
/// degree k to degree k + degree(). Missing blocks are zero maps.
class GradedMap {
 public:
  GradedMap() = default;
  explicit GradedMap(int degree) : degree_(degree) {}

  int degree() const { return degree_; }

  void set_block(int k, SparseMatrix m) { blocks_[k] = std::move(m); }
  bool has_block(int k) const { return blocks_.count(k) != 0; }
  const SparseMatrix* find(int k) const {
    auto it = blocks_.find(k);
    return it == blocks_.end() ? nullptr : &it->second;
  }
  const std::map<int, SparseMatrix>& blocks() const { return blocks_; }

  /// Block at degree k, materialized as a zero matrix of the given shape
  /// when absent.
  SparseMatrix block(int k, std::size_t rows, std::size_t cols) const {
    if (auto* m = find(k)) {
      if (m->rows() != rows || m->cols() != cols) {
        throw InputError("graded map block at degree " + std::to_string(k) + " has shape " +
                         std::to_string(m->rows()) + "x" + std::to_string(m->cols()) + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
      }
      return *m;
    }
    return SparseMatrix(rows, cols);
  }

  SparseVector apply(int k, const SparseVector& v) const {
    if (v.is_zero()) return {};
    auto* m = find(k);
    if (!m) return {};
    return m->apply(v);
  }

 private:
  int degree_ = 0;
  std::map<int, SparseMatrix> blocks_;
};

/// g after f, on the degrees where both blocks exist.
inline GradedMap compose(const GradedMap& g, const GradedMap& f) {
  GradedMap out(f.degree() + g.degree());
  for (const auto& [k, fm] : f.blocks()) {
    if (auto* gm = g.find(k + f.degree())) out.set_block(k, *gm * fm);
  }
  return out;
}

}  // namespace sectcat
