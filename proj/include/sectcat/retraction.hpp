#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sectcat/poincare.hpp"

namespace sectcat {

// ---------------------------------------------------------------------------
// Surjective trick
// ---------------------------------------------------------------------------

/// f = q i with R = A (x) Lambda(U + dU), i: A -> R a quasi-isomorphism,
/// r: R -> A a retraction of i and q: R -> B surjective in every stored
/// degree. U has one generator per basis vector of a complement of im f.
struct SurjectiveTrick {
  std::shared_ptr<const Cdga> source;  // A
  std::shared_ptr<const Cdga> ring;    // R
  std::shared_ptr<const Cdga> target;  // B
  CdgaMorphism f;
  CdgaMorphism i;
  CdgaMorphism r;
  CdgaMorphism q;
  DegreewiseIdeal kernel;  // K = ker q
  std::vector<std::string> added;
  int cap = 0;

  bool q_surjective = false;
  IsoResult i_quasi_iso;
  bool retraction_exact = false;
};

namespace detail {

inline std::string fresh_name(const std::set<std::string>& taken, std::string name) {
  while (taken.count(name)) name = "_" + name;
  return name;
}

inline Monomial widen(const Monomial& m, std::size_t n) {
  Monomial out = m;
  out.exponents.resize(n, 0);
  return out;
}

}  // namespace detail

inline SurjectiveTrick surjective_trick(const CdgaMorphism& f, int cap) {
  const Cdga& a = f.source();
  const Cdga& b = f.target();
  const int top = std::min(a.top(), b.top());
  if (cap < 0 || cap >= top) {
    throw InputError("cap " + std::to_string(cap) + " needs both algebras stored through degree " +
                     std::to_string(cap + 1));
  }
  const SullivanModel& model = a.model();
  std::vector<Generator> gens = model.generators();
  std::set<std::string> taken;
  for (const auto& g : gens) taken.insert(g.name);

  struct Added {
    int degree;
    SparseVector value;  // basis vector of B^degree outside im f
  };
  std::vector<Added> added;
  SurjectiveTrick out;
  for (int k = 1; k <= top; ++k) {
    auto image = rank_kernel_image(f.matrices().block(k, b.dim(k), a.dim(k))).image;
    auto complement = extend_to_complement(image, b.dim(k));
    for (std::size_t j = 0; j < complement.size(); ++j) {
      std::string u = detail::fresh_name(taken, "u" + std::to_string(k) + "_" + std::to_string(j));
      taken.insert(u);
      std::string du = detail::fresh_name(taken, "du" + std::to_string(k) + "_" + std::to_string(j));
      taken.insert(du);
      gens.push_back(Generator{u, k});
      gens.push_back(Generator{du, k + 1});
      added.push_back(Added{k, complement[j]});
      out.added.push_back(u);
    }
  }
  const std::size_t n_old = model.num_generators();
  const std::size_t n_new = gens.size();
  std::vector<PolyElement> diff(n_new);
  for (std::size_t g = 0; g < n_old; ++g) {
    for (const auto& [m, c] : model.differential(g)) add_term(diff[g], detail::widen(m, n_new), c);
  }
  for (std::size_t t = 0; t < added.size(); ++t) {
    Monomial du{std::vector<std::uint32_t>(n_new, 0)};
    du.exponents[n_old + 2 * t + 1] = 1;
    add_term(diff[n_old + 2 * t], du, 1);
  }
  ModelOptions options = model.options();
  for (const auto& g : gens) {
    if (g.degree == 1) options.allow_degree_one = true;
  }
  SullivanModel ring_model(std::move(gens), std::move(diff), options);
  Cdga ring = Cdga::from_model(ring_model, top);

  std::vector<Element> i_images, r_images, q_images;
  for (std::size_t g = 0; g < n_old; ++g) {
    const int deg = model.generators()[g].degree;
    i_images.push_back(Element{deg, deg <= ring.top() ? ring.to_coords(ring_model.generator_element(g)) : SparseVector{}});
  }
  for (std::size_t g = 0; g < n_new; ++g) {
    const int deg = ring_model.generators()[g].degree;
    if (g < n_old) {
      r_images.push_back(Element{deg, deg <= a.top() ? a.to_coords(model.generator_element(g)) : SparseVector{}});
      q_images.push_back(f.images()[g]);
    } else {
      r_images.push_back(Element{deg, {}});
      const auto& add = added[(g - n_old) / 2];
      if ((g - n_old) % 2 == 0) {
        q_images.push_back(Element{deg, add.value});
      } else {
        q_images.push_back(Element{deg, b.differential(add.degree, add.value)});
      }
    }
  }
  out.source = std::make_shared<const Cdga>(a);
  out.target = std::make_shared<const Cdga>(b);
  out.f = f;
  out.i = CdgaMorphism(a, ring, i_images);
  out.r = CdgaMorphism(ring, a, r_images);
  out.q = CdgaMorphism(ring, b, q_images);
  out.ring = std::make_shared<const Cdga>(std::move(ring));
  out.kernel = kernel_ideal(out.q);
  out.cap = cap;

  out.q_surjective = true;
  for (int k = 0; k <= top; ++k) {
    if (!out.q.surjective_in_degree(k)) out.q_surjective = false;
  }
  out.i_quasi_iso = is_iso_on_H(out.i.matrices(), complex_of(a), complex_of(*out.ring), 0, cap);
  out.retraction_exact = true;
  for (int k = 0; k <= top; ++k) {
    SparseMatrix ri = out.r.matrices().block(k, a.dim(k), out.ring->dim(k)) *
                      out.i.matrices().block(k, out.ring->dim(k), a.dim(k));
    if (!(ri == SparseMatrix::identity(a.dim(k)))) out.retraction_exact = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Semifree modules
// ---------------------------------------------------------------------------

struct SemifreeGenerator {
  std::string name;
  int degree = 0;
  int stage = 0;
  SparseVector boundary;  // d y, coordinates in P^{degree + 1}
  SparseVector image;     // psi(y), coordinates in B^{degree}
};

/// P = R + (+)_y R.y. In degree k the basis is R^k followed, for every
/// generator y in order of adjunction with |y| <= k, by R^{k-|y|}.y. New
/// generators only append blocks, so coordinates stay valid as P grows.
class SemifreeModule {
 public:
  static constexpr long ring_slot = -1;

  SemifreeModule() = default;
  explicit SemifreeModule(std::shared_ptr<const Cdga> ring) : ring_(std::move(ring)) {}

  const Cdga& ring() const { return *ring_; }
  const std::shared_ptr<const Cdga>& ring_ptr() const { return ring_; }
  int top() const { return ring_->top(); }
  const std::vector<SemifreeGenerator>& generators() const { return gens_; }

  struct Block {
    long slot;
    int ring_degree;
    std::size_t offset;
    std::size_t size;
  };

  std::vector<Block> blocks(int k) const {
    std::vector<Block> out;
    if (k < 0 || k > top()) return out;
    std::size_t off = 0;
    out.push_back(Block{ring_slot, k, 0, ring_->dim(k)});
    off += ring_->dim(k);
    for (std::size_t s = 0; s < gens_.size(); ++s) {
      int e = k - gens_[s].degree;
      if (e < 0) continue;
      out.push_back(Block{static_cast<long>(s), e, off, ring_->dim(e)});
      off += ring_->dim(e);
    }
    return out;
  }

  std::size_t dim(int k) const {
    auto bs = blocks(k);
    return bs.empty() ? 0 : bs.back().offset + bs.back().size;
  }

  /// Offset of the block of `slot` in degree k.
  std::optional<Block> block_of(int k, long slot) const {
    for (const auto& b : blocks(k)) {
      if (b.slot == slot) return b;
    }
    return std::nullopt;
  }

  /// Components of v (degree k) per block, as (block, ring vector).
  std::vector<std::pair<Block, SparseVector>> split(int k, const SparseVector& v) const {
    std::vector<std::pair<Block, SparseVector>> out;
    auto bs = blocks(k);
    auto it = v.entries().begin();
    for (const auto& b : bs) {
      SparseVector part;
      while (it != v.entries().end() && it->first < b.offset + b.size) {
        part.add_to(it->first - b.offset, it->second);
        ++it;
      }
      if (!part.is_zero()) out.emplace_back(b, std::move(part));
    }
    if (it != v.entries().end()) throw InputError("vector outside P in degree " + std::to_string(k));
    return out;
  }

  /// Places a ring vector into the block of `slot` in degree k.
  SparseVector embed(int k, long slot, const SparseVector& part) const {
    auto b = block_of(k, slot);
    if (!b) {
      if (part.is_zero()) return {};
      throw InputError("no block for generator slot in degree " + std::to_string(k));
    }
    const std::size_t off = b->offset;
    return part.remapped([off](std::size_t i) { return i + off; });
  }

  /// a . v for a ring element a and v in P^k (zero above the truncation).
  SparseVector act(const Element& a, int k, const SparseVector& v) const {
    SparseVector out;
    const int target = k + a.degree;
    if (target > top() || a.coords.is_zero()) return out;
    for (const auto& [b, part] : split(k, v)) {
      SparseVector prod = ring_->multiply(a.degree, a.coords, b.ring_degree, part);
      out.axpy(1, embed(target, b.slot, prod));
    }
    return out;
  }

  /// d(r.y) = dr.y + (-1)^{|r|} r.dy.
  SparseVector differential(int k, const SparseVector& v) const {
    SparseVector out;
    if (k >= top()) return out;
    for (const auto& [b, part] : split(k, v)) {
      out.axpy(1, embed(k + 1, b.slot, ring_->differential(b.ring_degree, part)));
      if (b.slot == ring_slot) continue;
      const auto& y = gens_[b.slot];
      out.axpy(b.ring_degree % 2 ? -1 : 1, act(Element{b.ring_degree, part}, y.degree + 1, y.boundary));
    }
    return out;
  }

  SparseMatrix d_matrix(int k) const {
    std::vector<SparseVector> cols;
    for (std::size_t j = 0; j < dim(k); ++j) cols.push_back(differential(k, SparseVector::unit(j)));
    return SparseMatrix::from_columns(dim(k + 1), std::move(cols));
  }

  void add_generator(SemifreeGenerator y) {
    if (y.degree < 0 || y.degree > top()) throw InputError("semifree generator outside the truncation");
    if (!y.boundary.is_zero() && y.boundary.max_index() >= dim(y.degree + 1)) {
      throw InputError("boundary of " + y.name + " lies outside P");
    }
    gens_.push_back(std::move(y));
  }

  /// P as a module over R on [0, top]; cohomology is certified below top.
  DgModule module() const {
    std::vector<std::size_t> dims;
    for (int k = 0; k <= top(); ++k) dims.push_back(dim(k));
    DgModule m(ring_, 0, dims, true, false);
    for (int k = 0; k < top(); ++k) m.set_d(k, d_matrix(k));
    const auto& rgens = ring_->generators();
    for (std::size_t g = 0; g < rgens.size(); ++g) {
      for (int k = 0; k + rgens[g].degree <= top(); ++k) {
        std::vector<SparseVector> cols;
        for (std::size_t j = 0; j < dim(k); ++j) cols.push_back(act(rgens[g], k, SparseVector::unit(j)));
        m.set_action(g, k, SparseMatrix::from_columns(dim(k + rgens[g].degree), std::move(cols)));
      }
    }
    return m;
  }

  /// psi(r.y) = q(r) psi(y), psi = q on R.
  SparseVector psi(const CdgaMorphism& q, int k, const SparseVector& v) const {
    const Cdga& b = q.target();
    SparseVector out;
    for (const auto& [blk, part] : split(k, v)) {
      SparseVector qr = q.matrices().apply(blk.ring_degree, part);
      if (blk.slot == ring_slot) {
        out.axpy(1, qr);
      } else {
        const auto& y = gens_[blk.slot];
        out.axpy(1, b.multiply(blk.ring_degree, qr, y.degree, y.image));
      }
    }
    return out;
  }

  GradedMap psi_map(const CdgaMorphism& q) const {
    GradedMap out(0);
    const int hi = std::min(top(), q.target().top());
    for (int k = 0; k <= hi; ++k) {
      std::vector<SparseVector> cols;
      for (std::size_t j = 0; j < dim(k); ++j) cols.push_back(psi(q, k, SparseVector::unit(j)));
      out.set_block(k, SparseMatrix::from_columns(q.target().dim(k), std::move(cols)));
    }
    return out;
  }

  /// The inclusion j: R -> P onto the R summand.
  GradedMap inclusion() const {
    GradedMap out(0);
    for (int k = 0; k <= top(); ++k) {
      std::vector<SparseVector> cols;
      for (std::size_t j = 0; j < ring_->dim(k); ++j) cols.push_back(SparseVector::unit(j));
      out.set_block(k, SparseMatrix::from_columns(dim(k), std::move(cols)));
    }
    return out;
  }

 private:
  std::shared_ptr<const Cdga> ring_;
  std::vector<SemifreeGenerator> gens_;
};

/// q = psi j with j: R -> P semifree and psi a quasi-isomorphism up to cap.
struct SemifreeFactorization {
  CdgaMorphism q;
  SemifreeModule module;
  int cap = 0;
  int stages = 0;
  GradedMap j;
  GradedMap psi;
};

/// Builds P degree by degree. In degree m, generators of degree m - 1 kill
/// the kernel of H^m(psi) and cocycle generators of degree m fill its
/// cokernel; this repeats until H^m(psi) is an isomorphism.
inline SemifreeFactorization semifree_factorization(const std::shared_ptr<const Cdga>& ring, const CdgaMorphism& q,
                                                    int cap, int stage_budget = -1) {
  const Cdga& b = q.target();
  if (cap >= std::min(ring->top(), b.top())) {
    throw InputError("semifree factorization needs both algebras stored above the cap");
  }
  if (stage_budget < 0) stage_budget = 4 * (cap + 2);
  SemifreeFactorization out;
  out.q = q;
  out.module = SemifreeModule(ring);
  out.cap = cap;
  SemifreeModule& p = out.module;
  auto hb = cohomology(b, cap);
  int stage = 0;
  for (int m = 0; m <= cap; ++m) {
    while (true) {
      if (stage > stage_budget) {
        throw std::runtime_error("semifree factorization exceeded its stage budget in degree " + std::to_string(m));
      }
      SparseMatrix d_in = m > 0 ? p.d_matrix(m - 1) : SparseMatrix(p.dim(0), 0);
      DegreeCohomology hp(m, p.dim(m), d_in, p.d_matrix(m));
      const auto& hbm = hb.at(m);
      std::vector<SparseVector> cols;
      for (const auto& z : hp.representatives()) {
        auto cls = hbm.class_of(p.psi(q, m, z));
        if (!cls) throw std::logic_error("psi is not a chain map in degree " + std::to_string(m));
        cols.push_back(std::move(*cls));
      }
      auto rk = rank_kernel_image(SparseMatrix::from_columns(hbm.betti(), std::move(cols)));
      if (!rk.kernel.empty()) {
        if (m == 0) throw PreconditionError("H^0(q) is not injective");
        std::vector<SemifreeGenerator> batch;
        for (std::size_t t = 0; t < rk.kernel.size(); ++t) {
          SparseVector z = hp.cocycle_of(rk.kernel[t]);
          auto pre = solve_linear(b.d(m - 1), p.psi(q, m, z));
          if (!pre) throw std::logic_error("kernel class of H(psi) has no primitive in B");
          batch.push_back(SemifreeGenerator{"y" + std::to_string(stage) + "_" + std::to_string(m - 1) + "_" +
                                                std::to_string(t),
                                            m - 1, stage, std::move(z), std::move(*pre)});
        }
        for (auto& y : batch) p.add_generator(std::move(y));
        ++stage;
        continue;
      }
      auto missing = extend_to_complement(rk.image, hbm.betti());
      if (!missing.empty()) {
        for (std::size_t t = 0; t < missing.size(); ++t) {
          p.add_generator(SemifreeGenerator{
              "y" + std::to_string(stage) + "_" + std::to_string(m) + "_" + std::to_string(t), m, stage, {},
              hbm.cocycle_of(missing[t])});
        }
        ++stage;
        continue;
      }
      break;
    }
  }
  out.stages = stage;
  out.j = p.inclusion();
  out.psi = p.psi_map(q);
  return out;
}

// ---------------------------------------------------------------------------
// Lifting
// ---------------------------------------------------------------------------

struct RetractionLift {
  std::vector<SparseVector> values;  // rho(y) in R^{|y|}, per generator
  GradedMap rho;                     // P -> R
};

/// rho: P -> R with rho j = id, as one linear system in the values rho(y):
/// d rho(y) = rho(dy) for every generator y.
inline std::optional<RetractionLift> lift_retraction(const SemifreeFactorization& sf) {
  const SemifreeModule& p = sf.module;
  const Cdga& r = p.ring();
  const auto& gens = p.generators();
  const std::size_t n = gens.size();
  std::vector<std::size_t> var_off(n + 1, 0), eq_off(n + 1, 0);
  for (std::size_t s = 0; s < n; ++s) {
    var_off[s + 1] = var_off[s] + r.dim(gens[s].degree);
    eq_off[s + 1] = eq_off[s] + r.dim(gens[s].degree + 1);
  }
  // occurrences[t]: (s, component of dy_s in the block of y_t)
  std::vector<std::vector<std::pair<std::size_t, std::pair<int, SparseVector>>>> occurrences(n);
  SparseVector rhs;
  for (std::size_t s = 0; s < n; ++s) {
    for (const auto& [blk, part] : p.split(gens[s].degree + 1, gens[s].boundary)) {
      if (blk.slot == SemifreeModule::ring_slot) {
        const std::size_t off = eq_off[s];
        rhs.axpy(1, part.remapped([off](std::size_t i) { return i + off; }));
      } else {
        occurrences[blk.slot].push_back({s, {blk.ring_degree, part}});
      }
    }
  }
  SparseMatrix system(eq_off[n], var_off[n]);
  for (std::size_t t = 0; t < n; ++t) {
    const int deg = gens[t].degree;
    for (std::size_t a = 0; a < r.dim(deg); ++a) {
      SparseVector col;
      SparseVector da = r.differential(deg, SparseVector::unit(a));
      const std::size_t own = eq_off[t];
      col.axpy(1, da.remapped([own](std::size_t i) { return i + own; }));
      for (const auto& [s, comp] : occurrences[t]) {
        const auto& [e, coeffs] = comp;
        SparseVector term = r.multiply(e, coeffs, deg, SparseVector::unit(a));
        const std::size_t off = eq_off[s];
        col.axpy(-1, term.remapped([off](std::size_t i) { return i + off; }));
      }
      system.column(var_off[t] + a) = std::move(col);
    }
  }
  auto x = solve_linear(system, rhs);
  if (!x) return std::nullopt;
  RetractionLift out;
  out.values.resize(n);
  for (const auto& [idx, v] : x->entries()) {
    std::size_t t = std::upper_bound(var_off.begin(), var_off.end(), idx) - var_off.begin() - 1;
    out.values[t].add_to(idx - var_off[t], v);
  }
  out.rho = GradedMap(0);
  for (int k = 0; k <= p.top(); ++k) {
    std::vector<SparseVector> cols(p.dim(k));
    for (const auto& blk : p.blocks(k)) {
      for (std::size_t j = 0; j < blk.size; ++j) {
        if (blk.slot == SemifreeModule::ring_slot) {
          cols[blk.offset + j] = SparseVector::unit(j);
        } else {
          const auto& y = gens[blk.slot];
          cols[blk.offset + j] = r.multiply(blk.ring_degree, SparseVector::unit(j), y.degree, out.values[blk.slot]);
        }
      }
    }
    out.rho.set_block(k, SparseMatrix::from_columns(r.dim(k), std::move(cols)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Witnesses
// ---------------------------------------------------------------------------

/// (P, g, psi, ret) with psi g = f and ret g = id, all over the source A.
struct RetractionWitness {
  std::shared_ptr<const Cdga> source;  // A
  std::shared_ptr<const Cdga> target;  // B
  GradedMap f;
  DgModule source_module;  // A over A
  DgModule p_module;       // P over A
  DgModule target_module;  // B over A through f
  GradedMap g;
  GradedMap psi;
  GradedMap ret;
  std::vector<std::string> generator_names;  // semifree generators of P
  int cap = 0;
};

struct VerificationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
  std::optional<std::string> first_failure() const {
    for (const auto& c : checks) {
      if (!c.passed) return c.name;
    }
    return std::nullopt;
  }
  const VerificationCheck& check(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return c;
    }
    throw std::out_of_range("no check named " + name);
  }
};

namespace checks {
inline constexpr const char* psi_g_is_f = "psi o g = f";
inline constexpr const char* ret_g_is_id = "ret o g = id";
inline constexpr const char* chain_maps = "g, psi, ret are chain maps";
inline constexpr const char* module_maps = "g, ret are module morphisms";
inline constexpr const char* psi_quasi_iso = "H(psi) iso up to cap";
}  // namespace checks

/// The five identities of a homotopy retraction, checked exactly on every
/// degree where the maps are stored (quasi-isomorphism on [0, cap]).
inline VerificationReport verify_retraction(const RetractionWitness& w) {
  VerificationReport rep;
  const Cdga& a = *w.source;
  const Cdga& b = *w.target;
  const int hi = std::min({a.top(), b.top(), w.p_module.high()});

  VerificationCheck c1{checks::psi_g_is_f, true, ""};
  VerificationCheck c2{checks::ret_g_is_id, true, ""};
  for (int k = 0; k <= hi; ++k) {
    const std::size_t pk = w.p_module.dim(k);
    SparseMatrix gk = w.g.block(k, pk, a.dim(k));
    if (c1.passed && !(w.psi.block(k, b.dim(k), pk) * gk == w.f.block(k, b.dim(k), a.dim(k)))) {
      c1.passed = false;
      c1.detail = "fails on degree " + std::to_string(k);
    }
    if (c2.passed && !(w.ret.block(k, a.dim(k), pk) * gk == SparseMatrix::identity(a.dim(k)))) {
      c2.passed = false;
      c2.detail = "fails on degree " + std::to_string(k);
    }
  }
  rep.checks.push_back(c1);
  rep.checks.push_back(c2);

  VerificationCheck c3{checks::chain_maps, true, ""};
  if (auto e = module_chain_map_defect(w.source_module, w.p_module, w.g)) {
    c3 = {checks::chain_maps, false, "g: " + *e};
  } else if (auto e2 = module_chain_map_defect(w.p_module, w.target_module, w.psi)) {
    c3 = {checks::chain_maps, false, "psi: " + *e2};
  } else if (auto e3 = module_chain_map_defect(w.p_module, w.source_module, w.ret)) {
    c3 = {checks::chain_maps, false, "ret: " + *e3};
  }
  rep.checks.push_back(c3);

  VerificationCheck c4{checks::module_maps, true, ""};
  if (auto e = module_morphism_defect(w.source_module, w.p_module, w.g)) {
    c4 = {checks::module_maps, false, "g: " + *e};
  } else if (auto e2 = module_morphism_defect(w.p_module, w.source_module, w.ret)) {
    c4 = {checks::module_maps, false, "ret: " + *e2};
  }
  rep.checks.push_back(c4);

  auto iso = is_iso_on_H(w.psi, w.p_module.complex(), w.target_module.complex(), 0, w.cap);
  rep.checks.push_back(VerificationCheck{checks::psi_quasi_iso, iso.iso, iso.reason});
  return rep;
}

// ---------------------------------------------------------------------------
// The full pipeline
// ---------------------------------------------------------------------------

enum class RetractionStatus {
  built,                 // witness constructed and verified
  not_injective,         // H(f) has a kernel: no retraction can exist
  not_pd,                // H(A) fails Poincare duality: the theorem does not apply
  no_retraction_at_cap,  // the lifting system is inconsistent and H(f) is not injective
  undetermined_at_cap,   // the hypotheses hold but no strict lift was found at this cap
};

inline const char* to_string(RetractionStatus s) {
  switch (s) {
    case RetractionStatus::built: return "retraction_built";
    case RetractionStatus::not_injective: return "not_injective";
    case RetractionStatus::not_pd: return "not_pd";
    case RetractionStatus::no_retraction_at_cap: return "no_retraction_at_cap";
    case RetractionStatus::undetermined_at_cap: return "undetermined_at_cap";
  }
  return "unknown";
}

struct RetractionOptions {
  /// Run the factorization and lift even when a hypothesis fails, to confirm
  /// that the lifting system is inconsistent.
  bool attempt_without_hypotheses = false;
  /// Compute the rank of H(phi_hat rho - l psi) (diagnostic only).
  bool bottom_triangle = true;
};

struct RetractionOutcome {
  RetractionStatus status = RetractionStatus::undetermined_at_cap;
  std::string message;
  InjectivityResult injectivity;
  PdCheck pd;
  bool duality_ok = false;
  std::optional<bool> kernel_killed;
  std::optional<bool> factorization;
  std::size_t adjoined_contractible = 0;  // generators u from the surjective trick
  std::size_t semifree_generators = 0;
  int stages = 0;
  std::optional<RetractionWitness> witness;
  std::optional<VerificationReport> verification;
  std::optional<std::size_t> bottom_triangle_rank;
};

/// Rank of H(D) on [lo, hi] for a degree-0 chain map D between modules.
inline std::size_t induced_rank(const GradedMap& d, const DgModule& source, const DgModule& target, int lo, int hi) {
  auto hs = cohomology(source.complex());
  auto ht = cohomology(target.complex());
  std::size_t total = 0;
  for (int k = lo; k <= hi; ++k) {
    if (!hs.covers(k) || !ht.covers(k) || hs.betti(k) == 0 || ht.betti(k) == 0) continue;
    total += rank_kernel_image(induced_map(d, hs, ht, k, k).at(k)).rank;
  }
  return total;
}

/// Surjective trick, Poincare duality data, semifree factorization and a
/// global lift, assembled into a verified witness when possible.
inline RetractionOutcome build_homotopy_retraction(const CdgaMorphism& f, int cap, RetractionOptions options = {}) {
  RetractionOutcome out;
  SurjectiveTrick st = surjective_trick(f, cap);
  out.adjoined_contractible = st.added.size();
  if (!st.q_surjective || !st.i_quasi_iso.iso || !st.retraction_exact) {
    throw std::logic_error("surjective trick produced an invalid factorization");
  }
  const Cdga& a = *st.source;
  const Cdga& b = *st.target;
  auto ha = cohomology(a, cap);
  auto hb = cohomology(b, cap);
  out.injectivity = is_injective_on_H(induced_map(f.matrices(), ha, hb, 0, cap), ha, 0, cap);
  out.pd = detect_pd(*st.ring, cohomology(*st.ring, cap));
  const bool injective = out.injectivity.injective;
  const bool pd = out.pd.pd;

  if (!injective) {
    out.status = RetractionStatus::not_injective;
    out.message = "H(f) is not injective in degree " + std::to_string(*out.injectivity.failing_degree) +
                  ": witness [" + a.format(*out.injectivity.failing_degree, out.injectivity.witness_cocycle) + "]";
  } else if (!pd) {
    out.status = RetractionStatus::not_pd;
    out.message = "H(R) is not a Poincare duality algebra: " + out.pd.reason;
  }
  if ((!injective || !pd) && !options.attempt_without_hypotheses) return out;

  std::optional<DualityMorphisms> duality;
  if (injective && pd) {
    auto choice = choose_omega_complement(*st.ring, *out.pd.certificate, &st.kernel);
    duality = build_duality_morphisms(st.ring, choice, &st.kernel, &st.q);
    out.duality_ok = duality->ok();
    out.kernel_killed = duality->kernel_killed;
    out.factorization = duality->factorization;
  }

  SemifreeFactorization sf = semifree_factorization(st.ring, st.q, cap);
  out.semifree_generators = sf.module.generators().size();
  out.stages = sf.stages;
  auto lift = lift_retraction(sf);
  if (!lift) {
    if (!injective) {
      out.status = RetractionStatus::no_retraction_at_cap;
      out.message += "; the lifting system is inconsistent";
    } else {
      out.status = RetractionStatus::undetermined_at_cap;
      out.message = (pd ? std::string("hypotheses hold but ") : out.message + "; ") +
                    "no strict lift exists at cap " + std::to_string(cap);
    }
    return out;
  }
  if (!injective) {
    throw std::logic_error("a module retraction was found although H(f) is not injective");
  }

  RetractionWitness w;
  w.source = st.source;
  w.target = st.target;
  w.f = f.matrices();
  w.cap = cap;
  DgModule p_over_r = sf.module.module();
  w.source_module = regular_module(st.source);
  w.p_module = restrict_scalars(p_over_r, st.source, st.i);
  w.target_module = pullback_module(st.source, b, generator_images(f));
  w.g = compose(sf.j, st.i.matrices());
  w.psi = sf.psi;
  w.ret = compose(st.r.matrices(), lift->rho);
  for (const auto& y : sf.module.generators()) w.generator_names.push_back(y.name);
  out.verification = verify_retraction(w);

  if (duality && options.bottom_triangle) {
    const int n = duality->n;
    GradedMap diff(0);
    for (int k = 0; k <= n && k <= sf.module.top(); ++k) {
      const std::size_t rows = duality->suspended_dual.dim(k);
      const std::size_t cols = sf.module.dim(k);
      SparseMatrix top_path = duality->phi_hat.block(k, rows, st.ring->dim(k)) *
                              lift->rho.block(k, st.ring->dim(k), cols);
      SparseMatrix bottom_path = duality->l->block(k, rows, b.dim(k)) * sf.psi.block(k, b.dim(k), cols);
      diff.set_block(k, top_path - bottom_path);
    }
    out.bottom_triangle_rank = induced_rank(diff, p_over_r, duality->suspended_dual, 0, n);
  }
  out.witness = std::move(w);
  if (out.verification->passed()) {
    out.status = RetractionStatus::built;
    out.message = "retraction built over " + std::to_string(out.semifree_generators) +
                  " semifree generators and verified";
  } else {
    out.status = RetractionStatus::undetermined_at_cap;
    out.message = "witness failed verification at '" + *out.verification->first_failure() + "'";
  }
  return out;
}

}  // namespace sectcat
