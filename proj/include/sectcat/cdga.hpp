#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sectcat/graded.hpp"
#include "sectcat/model.hpp"

namespace sectcat {

/// A homogeneous element of a graded algebra or module.
struct Element {
  int degree = 0;
  SparseVector coords;
};

/// A commutative cochain algebra known degreewise on [0, top].
///
/// Products landing above `top` are not stored; `finite()` says whether the
/// algebra is genuinely zero above top (an explicit finite algebra) or only
/// truncated there (a free model). Algebras built from a free model keep the
/// model and the monomial of every basis element.
class Cdga {
 public:
  Cdga() = default;

  static Cdga from_model(const SullivanModel& model, int top) {
    if (top < 0) throw InputError("negative truncation degree");
    Cdga a;
    a.top_ = top;
    a.finite_ = false;
    a.model_ = std::make_shared<const SullivanModel>(model);
    a.monomials_.resize(top + 1);
    std::vector<std::vector<std::string>> labels(top + 1);
    for (int k = 0; k <= top; ++k) {
      a.monomials_[k] = model.basis_in_degree(k, top);
      for (std::size_t i = 0; i < a.monomials_[k].size(); ++i) {
        a.index_[a.monomials_[k][i]] = i;
        labels[k].push_back(model.format(a.monomials_[k][i]));
      }
    }
    a.space_ = GradedVectorSpace(0, std::move(labels));
    a.allocate_products();
    for (int i = 0; i <= top; ++i) {
      for (int j = 0; i + j <= top; ++j) {
        for (std::size_t x = 0; x < a.dim(i); ++x) {
          for (std::size_t y = 0; y < a.dim(j); ++y) {
            auto prod = model.multiply(a.monomials_[i][x], a.monomials_[j][y]);
            if (!prod) continue;
            a.product_ref(i, x, j, y) = SparseVector{{a.index_.at(prod->second), Scalar(prod->first)}};
          }
        }
      }
    }
    a.differential_.resize(top);
    for (int k = 0; k < top; ++k) {
      std::vector<SparseVector> cols;
      for (const auto& m : a.monomials_[k]) cols.push_back(a.to_coords(model.apply_derivation(m)));
      a.differential_[k] = SparseMatrix::from_columns(a.dim(k + 1), std::move(cols));
    }
    for (std::size_t g = 0; g < model.num_generators(); ++g) {
      int deg = model.generators()[g].degree;
      if (deg <= top) {
        a.generators_.push_back(Element{deg, SparseVector::unit(a.index_.at(model.generator_monomial(g)))});
        a.generator_names_.push_back(model.generators()[g].name);
      }
    }
    return a;
  }

  /// Product callback for explicit algebras: (i, a, j, b) -> coordinates in
  /// degree i + j. Products with the unit (degree 0, index 0) are filled in
  /// automatically.
  using ProductRule = std::function<SparseVector(int, std::size_t, int, std::size_t)>;

  /// An explicit algebra on the given degreewise basis. `finite` declares the
  /// algebra zero above top. Degree 0 must be one-dimensional (the unit).
  static Cdga explicit_algebra(GradedVectorSpace space, std::vector<SparseMatrix> differential,
                               const ProductRule& rule, std::vector<Element> generators, bool finite,
                               std::vector<std::string> generator_names = {}) {
    Cdga a;
    a.space_ = std::move(space);
    if (a.space_.low() != 0) throw InputError("algebra must start in degree 0");
    a.top_ = a.space_.high();
    a.finite_ = finite;
    a.allocate_products();
    for (int i = 0; i <= a.top_; ++i) {
      for (int j = 0; i + j <= a.top_; ++j) {
        for (std::size_t x = 0; x < a.dim(i); ++x) {
          for (std::size_t y = 0; y < a.dim(j); ++y) {
            if (i == 0 && x == 0) {
              a.product_ref(i, x, j, y) = SparseVector::unit(y);
            } else if (j == 0 && y == 0) {
              a.product_ref(i, x, j, y) = SparseVector::unit(x);
            } else {
              a.product_ref(i, x, j, y) = rule(i, x, j, y);
            }
          }
        }
      }
    }
    differential.resize(a.top_);
    for (int k = 0; k < a.top_; ++k) {
      if (differential[k].rows() == 0 && differential[k].cols() == 0) {
        differential[k] = SparseMatrix(a.dim(k + 1), a.dim(k));
      }
      if (differential[k].rows() != a.dim(k + 1) || differential[k].cols() != a.dim(k)) {
        throw InputError("differential block at degree " + std::to_string(k) + " has the wrong shape");
      }
    }
    a.differential_ = std::move(differential);
    a.generators_ = std::move(generators);
    a.generator_names_ = std::move(generator_names);
    a.generator_names_.resize(a.generators_.size());
    for (std::size_t g = 0; g < a.generators_.size(); ++g) {
      if (a.generator_names_[g].empty()) a.generator_names_[g] = "g" + std::to_string(g);
    }
    return a;
  }

  int top() const { return top_; }
  /// Highest degree whose cohomology is determined by the stored data.
  int cap() const { return finite_ ? top_ : top_ - 1; }
  bool finite() const { return finite_; }
  const GradedVectorSpace& space() const { return space_; }
  std::size_t dim(int k) const { return space_.dim(k); }
  std::string label(int k, std::size_t i) const { return space_.label(k, i); }

  /// d: degree k -> k + 1, k < top. Above top the algebra is zero or unknown.
  const SparseMatrix& d(int k) const { return differential_.at(k); }
  SparseMatrix d_or_zero(int k) const {
    if (k >= 0 && k < top_) return differential_[k];
    return SparseMatrix(dim(k + 1), dim(k));
  }
  SparseVector differential(int k, const SparseVector& v) const {
    if (k < 0 || k >= top_) return {};
    return differential_[k].apply(v);
  }

  const SparseVector& product(int i, std::size_t a, int j, std::size_t b) const {
    static const SparseVector zero;
    if (i + j > top_ || i < 0 || j < 0) return zero;
    return products_[i][j][a * dim(j) + b];
  }

  SparseVector multiply(int i, const SparseVector& a, int j, const SparseVector& b) const {
    SparseVector out;
    if (i + j > top_) return out;
    for (const auto& [x, cx] : a.entries()) {
      for (const auto& [y, cy] : b.entries()) out.axpy(cx * cy, product(i, x, j, y));
    }
    return out;
  }
  Element multiply(const Element& a, const Element& b) const {
    return Element{a.degree + b.degree, multiply(a.degree, a.coords, b.degree, b.coords)};
  }

  /// Left multiplication by `a` as a matrix from degree k to k + |a|.
  SparseMatrix left_multiplication(const Element& a, int k) const {
    std::vector<SparseVector> cols;
    for (std::size_t x = 0; x < dim(k); ++x) cols.push_back(multiply(a.degree, a.coords, k, SparseVector::unit(x)));
    return SparseMatrix::from_columns(dim(k + a.degree), std::move(cols));
  }

  /// Algebra generators used for module-action checks.
  const std::vector<Element>& generators() const { return generators_; }
  const std::vector<std::string>& generator_names() const { return generator_names_; }

  bool has_model() const { return static_cast<bool>(model_); }
  const SullivanModel& model() const {
    if (!model_) throw std::logic_error("algebra was not built from a free model");
    return *model_;
  }
  const std::vector<Monomial>& monomials(int k) const { return monomials_.at(k); }
  std::optional<std::size_t> index_of(const Monomial& m) const {
    auto it = index_.find(m);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Coordinates of a polynomial in the monomial basis; terms above top are
  /// dropped. Requires a free model.
  SparseVector to_coords(const PolyElement& p) const {
    SparseVector v;
    for (const auto& [m, c] : p) {
      if (model().degree(m) > top_) continue;
      v.add_to(index_.at(m), c);
    }
    return v;
  }

  std::string format(int k, const SparseVector& v) const {
    if (v.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [i, c] : v.entries()) {
      Scalar a = c;
      bool neg = a < 0;
      if (neg) a = -a;
      if (first) {
        s += neg ? "-" : "";
      } else {
        s += neg ? " - " : " + ";
      }
      first = false;
      std::string l = label(k, i);
      if (a == 1) {
        s += l;
      } else {
        s += a.get_str() + "*" + (l.find(' ') != std::string::npos ? "(" + l + ")" : l);
      }
    }
    return s;
  }

 private:
  void allocate_products() {
    products_.assign(top_ + 1, {});
    for (int i = 0; i <= top_; ++i) {
      products_[i].resize(top_ - i + 1);
      for (int j = 0; i + j <= top_; ++j) products_[i][j].resize(dim(i) * dim(j));
    }
  }
  SparseVector& product_ref(int i, std::size_t a, int j, std::size_t b) { return products_[i][j][a * dim(j) + b]; }

  int top_ = 0;
  bool finite_ = false;
  GradedVectorSpace space_;
  std::vector<SparseMatrix> differential_;
  std::vector<std::vector<std::vector<SparseVector>>> products_;
  std::vector<Element> generators_;
  std::vector<std::string> generator_names_;
  std::shared_ptr<const SullivanModel> model_;
  std::vector<std::vector<Monomial>> monomials_;
  std::map<Monomial, std::size_t> index_;
};

/// Checks f d = d f on every degree k with k + 1 within both truncations.
/// Returns a description of the first failure.
inline std::optional<std::string> chain_map_defect(const Cdga& source, const Cdga& target, const GradedMap& f) {
  int limit = std::min(source.top(), target.top());
  for (int k = 0; k < limit; ++k) {
    SparseMatrix fk = f.block(k, target.dim(k), source.dim(k));
    SparseMatrix fk1 = f.block(k + 1, target.dim(k + 1), source.dim(k + 1));
    SparseMatrix lhs = fk1 * source.d(k);
    SparseMatrix rhs = target.d(k) * fk;
    if (!(lhs == rhs)) {
      for (std::size_t j = 0; j < source.dim(k); ++j) {
        if (!(lhs.column(j) == rhs.column(j))) {
          return "degree " + std::to_string(k) + ": f d(" + source.label(k, j) +
                 ") = " + target.format(k + 1, lhs.column(j)) + " but d f(" + source.label(k, j) +
                 ") = " + target.format(k + 1, rhs.column(j));
        }
      }
    }
  }
  return std::nullopt;
}

/// A morphism of commutative cochain algebras out of a free model, fixed by
/// the images of the generators and extended multiplicatively.
class CdgaMorphism {
 public:
  CdgaMorphism() = default;

  /// Throws InputError if an image has the wrong degree or the extension is
  /// not a chain map within the truncation.
  CdgaMorphism(Cdga source, Cdga target, std::vector<Element> images)
      : source_(std::move(source)), target_(std::move(target)), images_(std::move(images)) {
    const auto& model = source_.model();
    if (images_.size() != model.num_generators()) throw InputError("morphism needs one image per generator");
    for (std::size_t g = 0; g < images_.size(); ++g) {
      if (images_[g].degree != model.generators()[g].degree) {
        throw InputError("image of '" + model.generators()[g].name + "' has degree " +
                         std::to_string(images_[g].degree));
      }
    }
    int limit = std::min(source_.top(), target_.top());
    matrices_ = GradedMap(0);
    for (int k = 0; k <= limit; ++k) {
      std::vector<SparseVector> cols;
      for (const auto& m : source_.monomials(k)) cols.push_back(evaluate(m).coords);
      matrices_.set_block(k, SparseMatrix::from_columns(target_.dim(k), std::move(cols)));
    }
    if (auto defect = chain_map_defect(source_, target_, matrices_)) {
      throw InputError("not a chain map: " + *defect);
    }
  }

  const Cdga& source() const { return source_; }
  const Cdga& target() const { return target_; }
  const std::vector<Element>& images() const { return images_; }
  const GradedMap& matrices() const { return matrices_; }
  int top() const { return std::min(source_.top(), target_.top()); }

  /// Image of a monomial: ordered product of generator images.
  Element evaluate(const Monomial& m) const {
    const auto& model = source_.model();
    Element acc{0, SparseVector::unit(0)};
    for (std::size_t g = 0; g < m.exponents.size(); ++g) {
      for (std::uint32_t e = 0; e < m.exponents[g]; ++e) {
        acc = target_.multiply(acc, images_[g]);
        if (acc.degree > target_.top()) return Element{model.degree(m), {}};
      }
    }
    return acc;
  }

  bool surjective_in_degree(int k) const {
    return rank_kernel_image(matrices_.block(k, target_.dim(k), source_.dim(k))).rank == target_.dim(k);
  }

 private:
  Cdga source_;
  Cdga target_;
  std::vector<Element> images_;
  GradedMap matrices_;
};

/// Lambda(V + V') with the duplicated differential and mu: v, v' -> v.
struct TensorSquare {
  SullivanModel base;
  SullivanModel square;
  Cdga base_algebra;
  Cdga square_algebra;
  CdgaMorphism mu;
};

inline SullivanModel double_model(const SullivanModel& model) {
  std::vector<Generator> gens = model.generators();
  const std::size_t n = gens.size();
  for (std::size_t i = 0; i < n; ++i) gens.push_back(Generator{gens[i].name + "'", gens[i].degree});
  std::vector<PolyElement> diff(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [m, c] : model.differential(i)) {
      Monomial left{std::vector<std::uint32_t>(2 * n, 0)};
      Monomial right{std::vector<std::uint32_t>(2 * n, 0)};
      for (std::size_t g = 0; g < n; ++g) {
        left.exponents[g] = m.exponents[g];
        right.exponents[n + g] = m.exponents[g];
      }
      add_term(diff[i], left, c);
      add_term(diff[n + i], right, c);
    }
  }
  return SullivanModel(std::move(gens), std::move(diff), model.options());
}

/// Tensor square realized up to degree cap + 1.
inline TensorSquare tensor_square(const SullivanModel& model, int cap) {
  SullivanModel square = double_model(model);
  Cdga base = Cdga::from_model(model, cap + 1);
  Cdga sq = Cdga::from_model(square, cap + 1);
  std::vector<Element> images;
  const std::size_t n = model.num_generators();
  for (std::size_t i = 0; i < 2 * n; ++i) {
    std::size_t g = i % n;
    int deg = model.generators()[g].degree;
    if (deg <= base.top()) {
      images.push_back(Element{deg, base.to_coords(model.generator_element(g))});
    } else {
      images.push_back(Element{deg, {}});
    }
  }
  CdgaMorphism mu(sq, base, std::move(images));
  return TensorSquare{model, std::move(square), std::move(base), std::move(sq), std::move(mu)};
}

/// A graded subspace of an algebra, with an independent basis per degree.
struct DegreewiseIdeal {
  std::vector<std::vector<SparseVector>> basis;  // index = degree, 0..top

  std::size_t dim(int k) const { return k >= 0 && k < static_cast<int>(basis.size()) ? basis[k].size() : 0; }
  bool is_zero() const {
    for (const auto& b : basis) {
      if (!b.empty()) return false;
    }
    return true;
  }
};

inline DegreewiseIdeal zero_ideal(const Cdga& a) {
  return DegreewiseIdeal{std::vector<std::vector<SparseVector>>(a.top() + 1)};
}

/// Degreewise kernel of an algebra morphism (an ideal of the source).
inline DegreewiseIdeal kernel_ideal(const CdgaMorphism& f) {
  DegreewiseIdeal out = zero_ideal(f.source());
  for (int k = 0; k <= f.top(); ++k) {
    out.basis[k] = rank_kernel_image(f.matrices().block(k, f.target().dim(k), f.source().dim(k))).kernel;
  }
  return out;
}

/// I * J, spanned degreewise by products of basis elements.
inline DegreewiseIdeal ideal_product(const Cdga& a, const DegreewiseIdeal& i_ideal, const DegreewiseIdeal& j_ideal) {
  DegreewiseIdeal out = zero_ideal(a);
  for (int k = 0; k <= a.top(); ++k) {
    Reducer red(a.dim(k));
    for (int i = 0; i <= k; ++i) {
      for (const auto& x : i_ideal.basis[i]) {
        for (const auto& y : j_ideal.basis[k - i]) {
          SparseVector p = a.multiply(i, x, k - i, y);
          if (!p.is_zero() && red.insert(p)) out.basis[k].push_back(std::move(p));
        }
      }
    }
  }
  return out;
}

/// (ker mu)^m degreewise up to the truncation of the tensor square.
inline DegreewiseIdeal ideal_power_basis(const TensorSquare& ts, int m) {
  if (m < 1) throw InputError("ideal power must be at least 1");
  DegreewiseIdeal kernel = kernel_ideal(ts.mu);
  DegreewiseIdeal power = kernel;
  for (int e = 2; e <= m; ++e) power = ideal_product(ts.square_algebra, power, kernel);
  return power;
}

/// Whether every basis element of `sub` lies in `super`, degreewise.
inline bool ideal_contained_in(const Cdga& a, const DegreewiseIdeal& sub, const DegreewiseIdeal& super) {
  for (int k = 0; k <= a.top(); ++k) {
    Reducer red(a.dim(k));
    for (const auto& v : super.basis[k]) red.insert(v);
    for (const auto& v : sub.basis[k]) {
      if (!red.contains(v)) return false;
    }
  }
  return true;
}

/// First element of I whose differential leaves I, as a message.
inline std::optional<std::string> differential_ideal_defect(const Cdga& a, const DegreewiseIdeal& ideal) {
  for (int k = 0; k < a.top(); ++k) {
    Reducer red(a.dim(k + 1));
    for (const auto& v : ideal.basis[k + 1]) red.insert(v);
    for (const auto& v : ideal.basis[k]) {
      SparseVector dv = a.differential(k, v);
      if (!red.contains(dv)) {
        return "d(" + a.format(k, v) + ") = " + a.format(k + 1, dv) + " leaves the ideal";
      }
    }
  }
  return std::nullopt;
}

/// A/I with its induced differential, the projection, and for every quotient
/// basis element the canonical basis vector of A lifting it.
struct QuotientComplex {
  Cdga quotient;
  GradedMap projection;
  DegreewiseIdeal ideal;
  std::vector<std::vector<std::size_t>> lifts;
};

inline QuotientComplex quotient_by_ideal(const Cdga& a, const DegreewiseIdeal& ideal) {
  if (static_cast<int>(ideal.basis.size()) != a.top() + 1) throw InputError("ideal truncation mismatch");
  if (auto defect = differential_ideal_defect(a, ideal)) {
    throw PreconditionError("ideal is not stable under d: " + *defect);
  }
  QuotientComplex out;
  out.ideal = ideal;
  out.projection = GradedMap(0);
  out.lifts.resize(a.top() + 1);
  std::vector<std::vector<std::string>> labels(a.top() + 1);
  for (int k = 0; k <= a.top(); ++k) {
    Reducer red(a.dim(k), true);
    for (const auto& v : ideal.basis[k]) {
      if (!red.insert(v)) throw InputError("ideal basis is dependent in degree " + std::to_string(k));
    }
    const std::size_t r = ideal.basis[k].size();
    std::vector<std::size_t> input_to_quotient;
    for (std::size_t j = 0; j < a.dim(k); ++j) {
      if (red.insert(SparseVector::unit(j))) {
        out.lifts[k].push_back(j);
        labels[k].push_back(ideal.is_zero() ? a.label(k, j) : "[" + a.label(k, j) + "]");
      }
    }
    // inputs r.. r+dim-1 are the canonical vectors; only the kept ones matter
    std::map<std::size_t, std::size_t> quotient_index;
    {
      std::size_t input = r, q = 0;
      for (std::size_t j = 0; j < a.dim(k); ++j, ++input) {
        if (q < out.lifts[k].size() && out.lifts[k][q] == j) quotient_index[input] = q++;
      }
    }
    std::vector<SparseVector> cols;
    for (std::size_t j = 0; j < a.dim(k); ++j) {
      auto c = red.coordinates(SparseVector::unit(j));
      SparseVector col;
      for (const auto& [input, v] : c->entries()) {
        auto it = quotient_index.find(input);
        if (it != quotient_index.end()) col.add_to(it->second, v);
      }
      cols.push_back(std::move(col));
    }
    out.projection.set_block(k, SparseMatrix::from_columns(out.lifts[k].size(), std::move(cols)));
  }
  GradedVectorSpace space(0, std::move(labels));
  auto project = [&](int k, const SparseVector& v) { return out.projection.apply(k, v); };
  std::vector<SparseMatrix> diff(a.top());
  for (int k = 0; k < a.top(); ++k) {
    std::vector<SparseVector> cols;
    for (std::size_t j : out.lifts[k]) cols.push_back(project(k + 1, a.d(k).column(j)));
    diff[k] = SparseMatrix::from_columns(out.lifts[k + 1].size(), std::move(cols));
  }
  const auto& lifts = out.lifts;
  auto rule = [&a, &lifts, &project](int i, std::size_t x, int j, std::size_t y) {
    return project(i + j, a.product(i, lifts[i][x], j, lifts[j][y]));
  };
  std::vector<Element> gens;
  std::vector<std::string> names;
  for (std::size_t g = 0; g < a.generators().size(); ++g) {
    const auto& e = a.generators()[g];
    SparseVector p = project(e.degree, e.coords);
    if (!p.is_zero()) {
      gens.push_back(Element{e.degree, std::move(p)});
      names.push_back(a.generator_names()[g]);
    }
  }
  if (space.dim(0) != 1) throw PreconditionError("quotient must keep the unit");
  out.quotient = Cdga::explicit_algebra(std::move(space), std::move(diff), rule, std::move(gens), a.finite(),
                                        std::move(names));
  return out;
}

/// The projection from a Cdga onto a quotient, as a CdgaMorphism (source must
/// come from a free model).
inline CdgaMorphism projection_morphism(const Cdga& a, const QuotientComplex& q) {
  std::vector<Element> images;
  const auto& model = a.model();
  for (std::size_t g = 0; g < model.num_generators(); ++g) {
    int deg = model.generators()[g].degree;
    SparseVector v;
    if (deg <= a.top()) v = q.projection.apply(deg, a.to_coords(model.generator_element(g)));
    images.push_back(Element{deg, std::move(v)});
  }
  return CdgaMorphism(a, q.quotient, std::move(images));
}

/// Span of the monomials of word length > n.
inline DegreewiseIdeal word_length_ideal(const Cdga& a, int n) {
  DegreewiseIdeal out = zero_ideal(a);
  for (int k = 0; k <= a.top(); ++k) {
    const auto& mons = a.monomials(k);
    for (std::size_t i = 0; i < mons.size(); ++i) {
      if (static_cast<int>(mons[i].word_length()) > n) out.basis[k].push_back(SparseVector::unit(i));
    }
  }
  return out;
}

/// Lambda V / Lambda^{>n} V on the free model realized up to cap + 1. Throws
/// PreconditionError when d lowers word length into the kept part.
inline QuotientComplex word_length_quotient(const Cdga& a, int n) {
  if (n < 0) throw InputError("word length must be non-negative");
  return quotient_by_ideal(a, word_length_ideal(a, n));
}

}  // namespace sectcat
