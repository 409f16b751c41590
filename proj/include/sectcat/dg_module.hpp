#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sectcat/cohomology.hpp"

namespace sectcat {

/// A cochain module over a commutative cochain algebra built from a free
/// model, stored degreewise on [low, high].
///
/// The action is recorded for the algebra generators only; the action of a
/// monomial is the composite of its generator actions, innermost factor
/// first. Blocks that would leave the window are not stored (zero).
class DgModule {
 public:
  DgModule() = default;
  DgModule(std::shared_ptr<const Cdga> base, int low, std::vector<std::size_t> dims, bool zero_below,
           bool zero_above)
      : base_(std::move(base)),
        low_(low),
        dims_(std::move(dims)),
        zero_below_(zero_below),
        zero_above_(zero_above),
        d_(dims_.empty() ? 0 : dims_.size() - 1),
        actions_(base_->generators().size()) {
    for (int k = low_; k < high(); ++k) d_[k - low_] = SparseMatrix(dim(k + 1), dim(k));
    if (base_->has_model()) {
      const auto& model = base_->model();
      position_.assign(model.num_generators(), npos);
      std::size_t pos = 0;
      for (std::size_t g = 0; g < model.num_generators(); ++g) {
        if (model.generators()[g].degree <= base_->top()) position_[g] = pos++;
      }
    }
  }

  const Cdga& base() const { return *base_; }
  const std::shared_ptr<const Cdga>& base_ptr() const { return base_; }
  int low() const { return low_; }
  int high() const { return low_ + static_cast<int>(dims_.size()) - 1; }
  bool stores(int k) const { return k >= low_ && k <= high(); }
  std::size_t dim(int k) const { return stores(k) ? dims_[k - low_] : 0; }
  bool zero_below() const { return zero_below_; }
  bool zero_above() const { return zero_above_; }

  void set_d(int k, SparseMatrix m) {
    if (k < low_ || k >= high()) throw InputError("differential block outside the module window");
    check_shape(m, dim(k + 1), dim(k), "differential");
    d_[k - low_] = std::move(m);
  }
  SparseMatrix d(int k) const {
    if (k >= low_ && k < high()) return d_[k - low_];
    return SparseMatrix(dim(k + 1), dim(k));
  }
  SparseVector differential(int k, const SparseVector& v) const {
    if (k < low_ || k >= high() || v.is_zero()) return {};
    return d_[k - low_].apply(v);
  }

  /// Action of the g-th algebra generator on degree k.
  void set_action(std::size_t g, int k, SparseMatrix m) {
    int target = k + base_->generators().at(g).degree;
    if (!stores(k) || !stores(target)) throw InputError("action block outside the module window");
    check_shape(m, dim(target), dim(k), "action");
    actions_.at(g).set_block(k, std::move(m));
  }
  SparseMatrix action(std::size_t g, int k) const {
    int target = k + base_->generators().at(g).degree;
    return actions_.at(g).block(k, dim(target), dim(k));
  }
  SparseVector act_generator(std::size_t g, int k, const SparseVector& v) const {
    return actions_.at(g).apply(k, v);
  }

  /// a . v for a homogeneous algebra element a and v in degree k.
  SparseVector act(const Element& a, int k, const SparseVector& v) const {
    SparseVector out;
    if (v.is_zero() || a.coords.is_zero() || k + a.degree > high()) return out;
    const auto& model = base_->model();
    for (const auto& [idx, c] : a.coords.entries()) {
      const Monomial& m = base_->monomials(a.degree).at(idx);
      SparseVector w = v;
      int cur = k;
      for (std::size_t g = m.exponents.size(); g-- > 0 && !w.is_zero();) {
        for (std::uint32_t e = 0; e < m.exponents[g] && !w.is_zero(); ++e) {
          w = act_generator(position_.at(g), cur, w);
          cur += model.generators()[g].degree;
        }
      }
      out.axpy(c, w);
    }
    return out;
  }

  CochainComplex complex() const {
    CochainComplex c;
    c.low = low_;
    c.dims = dims_;
    c.d = d_;
    c.zero_below = zero_below_;
    c.zero_above = zero_above_;
    return c;
  }

  /// First degree where d^2 != 0.
  std::optional<std::string> square_defect() const {
    if (auto k = complex().square_defect()) return "d^2 != 0 on degree " + std::to_string(*k);
    return std::nullopt;
  }

  /// Checks d(g.m) = dg.m + (-1)^|g| g.dm on every generator/basis pair.
  std::optional<std::string> leibniz_defect() const {
    const auto& gens = base_->generators();
    for (std::size_t g = 0; g < gens.size(); ++g) {
      const int e = gens[g].degree;
      Element dg{e + 1, base_->differential(e, gens[g].coords)};
      for (int k = low_; k + e + 1 <= high(); ++k) {
        for (std::size_t j = 0; j < dim(k); ++j) {
          SparseVector m = SparseVector::unit(j);
          SparseVector lhs = differential(k + e, act_generator(g, k, m));
          SparseVector rhs = act(dg, k, m);
          rhs.axpy(e % 2 ? -1 : 1, act_generator(g, k + 1, differential(k, m)));
          if (!(lhs == rhs)) {
            return "Leibniz rule fails for generator " + base_->generator_names()[g] + " on basis element " +
                   std::to_string(j) + " of degree " + std::to_string(k);
          }
        }
      }
    }
    return std::nullopt;
  }

  /// Checks g.(h.m) = (-1)^{|g||h|} h.(g.m) and g.(g.m) = 0 for odd g.
  std::optional<std::string> commutativity_defect() const {
    const auto& gens = base_->generators();
    for (std::size_t g = 0; g < gens.size(); ++g) {
      for (std::size_t h = g; h < gens.size(); ++h) {
        const int eg = gens[g].degree, eh = gens[h].degree;
        const int sign = (eg * eh) % 2 ? -1 : 1;
        for (int k = low_; k + eg + eh <= high(); ++k) {
          for (std::size_t j = 0; j < dim(k); ++j) {
            SparseVector m = SparseVector::unit(j);
            SparseVector gh = act_generator(g, k + eh, act_generator(h, k, m));
            SparseVector hg = act_generator(h, k + eg, act_generator(g, k, m));
            if (!(gh == Scalar(sign) * hg)) {
              return "generators " + base_->generator_names()[g] + " and " + base_->generator_names()[h] +
                     " do not graded-commute on degree " + std::to_string(k);
            }
          }
        }
      }
    }
    return std::nullopt;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  static void check_shape(const SparseMatrix& m, std::size_t rows, std::size_t cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols) {
      throw InputError(std::string(what) + " block has shape " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }

  std::shared_ptr<const Cdga> base_;
  int low_ = 0;
  std::vector<std::size_t> dims_;
  bool zero_below_ = true;
  bool zero_above_ = false;
  std::vector<SparseMatrix> d_;
  std::vector<GradedMap> actions_;
  std::vector<std::size_t> position_;
};

/// The algebra as a module over itself.
inline DgModule regular_module(const std::shared_ptr<const Cdga>& a) {
  std::vector<std::size_t> dims;
  for (int k = 0; k <= a->top(); ++k) dims.push_back(a->dim(k));
  DgModule m(a, 0, dims, true, a->finite());
  for (int k = 0; k < a->top(); ++k) m.set_d(k, a->d(k));
  for (std::size_t g = 0; g < a->generators().size(); ++g) {
    const auto& gen = a->generators()[g];
    for (int k = 0; k + gen.degree <= a->top(); ++k) m.set_action(g, k, a->left_multiplication(gen, k));
  }
  return m;
}

/// A target algebra B viewed as a module over `base` through the algebra map
/// sending the base generators to `generator_images` (elements of B, listed
/// in the order of base->generators()).
inline DgModule pullback_module(const std::shared_ptr<const Cdga>& base, const Cdga& target,
                                const std::vector<Element>& generator_images) {
  if (generator_images.size() != base->generators().size()) {
    throw InputError("pullback module needs one image per algebra generator");
  }
  std::vector<std::size_t> dims;
  for (int k = 0; k <= target.top(); ++k) dims.push_back(target.dim(k));
  DgModule m(base, 0, dims, true, target.finite());
  for (int k = 0; k < target.top(); ++k) m.set_d(k, target.d(k));
  for (std::size_t g = 0; g < generator_images.size(); ++g) {
    const auto& img = generator_images[g];
    for (int k = 0; k + img.degree <= target.top(); ++k) m.set_action(g, k, target.left_multiplication(img, k));
  }
  return m;
}

/// Images of the source algebra generators (in the order of
/// source().generators()) under a morphism out of a free model.
inline std::vector<Element> generator_images(const CdgaMorphism& f) {
  std::vector<Element> out;
  for (const auto& g : f.source().generators()) out.push_back(Element{g.degree, f.matrices().apply(g.degree, g.coords)});
  return out;
}

/// An R-module viewed as an A-module along an algebra map i: A -> R.
inline DgModule restrict_scalars(const DgModule& m, const std::shared_ptr<const Cdga>& a, const CdgaMorphism& i) {
  std::vector<std::size_t> dims;
  for (int k = m.low(); k <= m.high(); ++k) dims.push_back(m.dim(k));
  DgModule out(a, m.low(), dims, m.zero_below(), m.zero_above());
  for (int k = m.low(); k < m.high(); ++k) out.set_d(k, m.d(k));
  auto images = generator_images(i);
  for (std::size_t g = 0; g < images.size(); ++g) {
    const auto& img = images[g];
    for (int k = m.low(); k + img.degree <= m.high(); ++k) {
      std::vector<SparseVector> cols;
      for (std::size_t j = 0; j < m.dim(k); ++j) cols.push_back(m.act(img, k, SparseVector::unit(j)));
      out.set_action(g, k, SparseMatrix::from_columns(m.dim(k + img.degree), std::move(cols)));
    }
  }
  return out;
}

/// Hom(A, Q) as an A-module: degree -k is the dual of A^k (dual basis),
/// (delta f) = -(-1)^{|f|} f d and (a.f)(x) = (-1)^{|a||f|} f(a x).
inline DgModule dual_module(const std::shared_ptr<const Cdga>& a) {
  const int top = a->top();
  std::vector<std::size_t> dims;
  for (int k = top; k >= 0; --k) dims.push_back(a->dim(k));
  DgModule m(a, -top, dims, a->finite(), true);
  for (int k = 1; k <= top; ++k) {
    // delta: Hom^{-k} -> Hom^{-k+1} is -(-1)^{-k} (d_{k-1})^T
    m.set_d(-k, a->d(k - 1).transpose().scaled(k % 2 ? 1 : -1));
  }
  for (std::size_t g = 0; g < a->generators().size(); ++g) {
    const auto& gen = a->generators()[g];
    const int i = gen.degree;
    for (int k = i; k <= top; ++k) {
      // a.f for f in Hom^{-k} lands in Hom^{-k+i}: (-1)^{ik} (L_a: A^{k-i} -> A^k)^T
      m.set_action(g, -k, a->left_multiplication(gen, k - i).transpose().scaled((i * k) % 2 ? -1 : 1));
    }
  }
  return m;
}

/// s^{-n} M: (s^{-n}M)^i = M^{i-n}, d(s^{-n}x) = (-1)^n s^{-n}dx and
/// a.s^{-n}x = (-1)^{n|a|} s^{-n}(a.x). Coordinates are unchanged.
inline DgModule suspend_module(const DgModule& m, int n) {
  std::vector<std::size_t> dims;
  for (int k = m.low(); k <= m.high(); ++k) dims.push_back(m.dim(k));
  DgModule out(m.base_ptr(), m.low() + n, dims, m.zero_below(), m.zero_above());
  const Scalar dsign = n % 2 ? -1 : 1;
  for (int k = m.low(); k < m.high(); ++k) out.set_d(k + n, m.d(k).scaled(dsign));
  for (std::size_t g = 0; g < m.base().generators().size(); ++g) {
    const int e = m.base().generators()[g].degree;
    const Scalar asign = (n * e) % 2 ? -1 : 1;
    for (int k = m.low(); k + e <= m.high(); ++k) out.set_action(g, k + n, m.action(g, k).scaled(asign));
  }
  return out;
}

/// Checks F d = d F for a degree-0 map between modules, on every degree where
/// both sides are stored.
inline std::optional<std::string> module_chain_map_defect(const DgModule& source, const DgModule& target,
                                                          const GradedMap& f) {
  if (f.degree() != 0) throw InputError("chain map check expects a degree-0 map");
  const int lo = std::max(source.low(), target.low());
  const int hi = std::min(source.high(), target.high());
  for (int k = lo; k < hi; ++k) {
    SparseMatrix lhs = f.block(k + 1, target.dim(k + 1), source.dim(k + 1)) * source.d(k);
    SparseMatrix rhs = target.d(k) * f.block(k, target.dim(k), source.dim(k));
    if (!(lhs == rhs)) return "F d != d F on degree " + std::to_string(k);
  }
  return std::nullopt;
}

/// Checks F(g.m) = g.F(m) for every algebra generator g, on every degree
/// where both sides are stored.
inline std::optional<std::string> module_morphism_defect(const DgModule& source, const DgModule& target,
                                                         const GradedMap& f) {
  if (f.degree() != 0) throw InputError("module morphism check expects a degree-0 map");
  const auto& gens = source.base().generators();
  if (gens.size() != target.base().generators().size()) {
    throw InputError("modules are over different algebras");
  }
  const int lo = std::max(source.low(), target.low());
  const int hi = std::min(source.high(), target.high());
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const int e = gens[g].degree;
    for (int k = lo; k + e <= hi; ++k) {
      SparseMatrix lhs = f.block(k + e, target.dim(k + e), source.dim(k + e)) * source.action(g, k);
      SparseMatrix rhs = target.action(g, k) * f.block(k, target.dim(k), source.dim(k));
      if (!(lhs == rhs)) {
        return "F(" + source.base().generator_names()[g] + " . m) != " + source.base().generator_names()[g] +
               " . F(m) on degree " + std::to_string(k);
      }
    }
  }
  return std::nullopt;
}

}  // namespace sectcat
