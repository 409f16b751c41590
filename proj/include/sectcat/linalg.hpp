#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sectcat/sparse_vector.hpp"

namespace sectcat {

/// Column-major sparse matrix. Column j is the image of the j-th source basis
/// vector, so `rows` is the target dimension and `cols` the source dimension.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), columns_(cols) {}

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.columns_[i] = SparseVector::unit(i);
    return m;
  }

  static SparseMatrix from_columns(std::size_t rows, std::vector<SparseVector> cols) {
    SparseMatrix m;
    m.rows_ = rows;
    m.columns_ = std::move(cols);
    for (const auto& c : m.columns_) {
      if (!c.is_zero() && c.max_index() >= rows) {
        throw std::out_of_range("column entry beyond row count");
      }
    }
    return m;
  }

  static SparseMatrix from_dense(const std::vector<std::vector<Scalar>>& rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.front().size();
    SparseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw InputError("ragged dense matrix");
      for (std::size_t j = 0; j < c; ++j) m.columns_[j].add_to(i, rows[i][j]);
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  const SparseVector& column(std::size_t j) const { return columns_.at(j); }
  SparseVector& column(std::size_t j) { return columns_.at(j); }
  const std::vector<SparseVector>& columns() const { return columns_; }

  Scalar at(std::size_t i, std::size_t j) const { return columns_.at(j).get(i); }

  bool is_zero() const {
    for (const auto& c : columns_) {
      if (!c.is_zero()) return false;
    }
    return true;
  }

  SparseVector apply(const SparseVector& v) const {
    SparseVector out;
    for (const auto& [j, x] : v.entries()) {
      if (j >= columns_.size()) throw std::out_of_range("vector longer than matrix source");
      out.axpy(x, columns_[j]);
    }
    return out;
  }

  /// Rows as sparse vectors (the transpose's columns).
  std::vector<SparseVector> row_vectors() const {
    std::vector<SparseVector> out(rows_);
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      for (const auto& [i, v] : columns_[j].entries()) out[i].add_to(j, v);
    }
    return out;
  }

  SparseMatrix transpose() const { return from_columns(cols(), row_vectors()); }

  SparseMatrix scaled(const Scalar& s) const {
    SparseMatrix m = *this;
    for (auto& c : m.columns_) c.scale(s);
    return m;
  }

  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols() != b.rows()) throw InputError("matrix product dimension mismatch");
    SparseMatrix m(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) m.columns_[j] = a.apply(b.columns_[j]);
    return m;
  }
  friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("matrix sum dimension mismatch");
    SparseMatrix m = a;
    for (std::size_t j = 0; j < b.cols(); ++j) m.columns_[j].axpy(1, b.columns_[j]);
    return m;
  }
  friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) {
    return a + b.scaled(-1);
  }
  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.columns_ == b.columns_;
  }

 private:
  std::size_t rows_ = 0;
  std::vector<SparseVector> columns_;
};

/// Incremental echelon basis of a subspace of Q^dim.
///
/// Every stored vector has a distinct pivot (its lowest nonzero index) with
/// coefficient 1, and new vectors are reduced at all pivot positions before
/// being stored. With tracking enabled each stored vector also carries the
/// combination of inserted inputs it equals, which lets `coordinates`
/// express a vector in terms of the inputs.
class Reducer {
 public:
  explicit Reducer(std::size_t dim, bool track = false)
      : dim_(dim), track_(track), slot_of_pivot_(dim, npos) {}

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return rows_.size(); }
  std::size_t inputs() const { return inputs_; }

  /// Inserts v. Returns true if v was independent of everything inserted so
  /// far. When dependent and tracking, `relation` receives coefficients c
  /// over inputs with sum c_k input_k = 0 and coefficient 1 on this input.
  bool insert(const SparseVector& v, SparseVector* relation = nullptr) {
    check(v);
    SparseVector combo;
    if (track_) combo = SparseVector::unit(inputs_);
    ++inputs_;
    SparseVector rem = v;
    reduce_in_place(rem, track_ ? &combo : nullptr, -1);
    if (rem.is_zero()) {
      if (relation) *relation = std::move(combo);
      return false;
    }
    Scalar inv = 1 / rem.entries().front().second;
    rem.scale(inv);
    combo.scale(inv);
    slot_of_pivot_[rem.lead()] = rows_.size();
    pivots_.push_back(rem.lead());
    rows_.push_back(Row{std::move(rem), std::move(combo)});
    return true;
  }

  /// v with every pivot coordinate eliminated; zero iff v lies in the span.
  SparseVector remainder(const SparseVector& v) const {
    check(v);
    SparseVector rem = v;
    reduce_in_place(rem, nullptr, -1);
    return rem;
  }

  bool contains(const SparseVector& v) const { return remainder(v).is_zero(); }

  /// Coefficients over the inputs expressing v, or nullopt if v is outside
  /// the span. Requires tracking.
  std::optional<SparseVector> coordinates(const SparseVector& v) const {
    if (!track_) throw std::logic_error("Reducer::coordinates needs tracking");
    check(v);
    SparseVector rem = v;
    SparseVector acc;
    reduce_in_place(rem, &acc, +1);
    if (!rem.is_zero()) return std::nullopt;
    return acc;
  }

  /// Stored rows, fully inter-reduced (reduced row echelon form), ordered by
  /// increasing pivot.
  std::vector<SparseVector> rref_rows() const {
    std::vector<std::size_t> order(pivots_);
    std::sort(order.begin(), order.end());
    std::vector<SparseVector> out;
    out.reserve(order.size());
    for (std::size_t p : order) out.push_back(rows_[slot_of_pivot_[p]].vec);
    // back-substitute from the largest pivot downwards
    for (std::size_t a = out.size(); a-- > 0;) {
      for (std::size_t b = a + 1; b < out.size(); ++b) {
        Scalar c = out[a].get(order[b]);
        if (c != 0) out[a].axpy(-c, out[b]);
      }
    }
    return out;
  }

  const std::vector<std::size_t>& pivots() const { return pivots_; }
  const SparseVector& stored(std::size_t slot) const { return rows_.at(slot).vec; }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  struct Row {
    SparseVector vec;
    SparseVector combo;
  };

  void check(const SparseVector& v) const {
    if (!v.is_zero() && v.max_index() >= dim_) {
      throw InputError("vector index " + std::to_string(v.max_index()) +
                       " outside ambient dimension " + std::to_string(dim_));
    }
  }

  // Eliminates pivot coordinates in ascending order. Each elimination only
  // touches indices at or above the pivot, so one upward sweep suffices.
  void reduce_in_place(SparseVector& v, SparseVector* combo, int sign) const {
    std::size_t cursor = 0;
    while (true) {
      const auto& es = v.entries();
      auto it = std::lower_bound(es.begin(), es.end(), cursor,
                                 [](const SparseVector::Entry& e, std::size_t k) { return e.first < k; });
      while (it != es.end() && slot_of_pivot_[it->first] == npos) ++it;
      if (it == es.end()) return;
      std::size_t p = it->first;
      Scalar c = it->second;
      const Row& row = rows_[slot_of_pivot_[p]];
      v.axpy(-c, row.vec);
      if (combo) combo->axpy(sign * c, row.combo);
      cursor = p + 1;
    }
  }

  std::size_t dim_;
  bool track_;
  std::size_t inputs_ = 0;
  std::vector<Row> rows_;
  std::vector<std::size_t> pivots_;
  std::vector<std::size_t> slot_of_pivot_;
};

struct RankKernelImage {
  std::size_t rank = 0;
  std::vector<SparseVector> kernel;       // basis of ker M, in the source
  std::vector<SparseVector> image;        // independent columns of M
  std::vector<std::size_t> pivot_columns; // indices of those columns
};

/// Rank, kernel and image of M by row reduction with lowest-index pivots.
/// The kernel basis has one vector per non-pivot column j, with coefficient 1
/// at j.
inline RankKernelImage rank_kernel_image(const SparseMatrix& m) {
  Reducer rows(m.cols());
  for (const auto& r : m.row_vectors()) rows.insert(r);
  auto rref = rows.rref_rows();
  RankKernelImage out;
  out.rank = rref.size();
  std::vector<bool> is_pivot(m.cols(), false);
  for (const auto& r : rref) {
    is_pivot[r.lead()] = true;
    out.pivot_columns.push_back(r.lead());
  }
  for (std::size_t j : out.pivot_columns) out.image.push_back(m.column(j));
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    SparseVector k = SparseVector::unit(f);
    for (const auto& r : rref) {
      Scalar c = r.get(f);
      if (c != 0) k.add_to(r.lead(), -c);
    }
    out.kernel.push_back(std::move(k));
  }
  return out;
}

/// Particular solution x of M x = b (free variables set to zero), or nullopt
/// when the system is inconsistent.
inline std::optional<SparseVector> solve_linear(const SparseMatrix& m, const SparseVector& b) {
  if (!b.is_zero() && b.max_index() >= m.rows()) {
    throw InputError("right-hand side longer than matrix row count");
  }
  const std::size_t n = m.cols();
  auto rows = m.row_vectors();
  Reducer echelon(n + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    SparseVector aug = rows[i];
    aug.add_to(n, b.get(i));
    echelon.insert(aug);
  }
  for (std::size_t p : echelon.pivots()) {
    if (p == n) return std::nullopt;
  }
  auto rref = echelon.rref_rows();
  SparseVector x;
  for (const auto& r : rref) {
    // rref rows are fully reduced, so every other pivot column is zero here
    // and the free variables are zero: x_pivot = rhs.
    x.add_to(r.lead(), r.get(n));
  }
  return x;
}

/// Greedy complement of span(U) inside span(W): each vector of W (canonical
/// basis of Q^dim when W is empty) is kept iff it is independent of U and the
/// vectors kept before it. Throws if U is dependent or not contained in W.
inline std::vector<SparseVector> extend_to_complement(const std::vector<SparseVector>& u,
                                                      std::size_t dim,
                                                      const std::vector<SparseVector>& w = {}) {
  Reducer red(dim);
  for (const auto& v : u) {
    if (!red.insert(v)) throw InputError("extend_to_complement: U is linearly dependent");
  }
  std::vector<SparseVector> out;
  if (w.empty()) {
    for (std::size_t j = 0; j < dim; ++j) {
      if (red.rank() == dim) break;
      auto e = SparseVector::unit(j);
      if (red.insert(e)) out.push_back(std::move(e));
    }
  } else {
    Reducer span_w(dim);
    for (const auto& v : w) span_w.insert(v);
    for (const auto& v : u) {
      if (!span_w.contains(v)) throw InputError("extend_to_complement: U not contained in W");
    }
    for (const auto& v : w) {
      if (red.insert(v)) out.push_back(v);
    }
  }
  return out;
}

}  // namespace sectcat
