#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sectcat/dg_module.hpp"

namespace sectcat {

/// Evidence that H(A) is a Poincare duality algebra of formal dimension n.
struct PdCertificate {
  int n = 0;
  SparseVector omega_class;  // fundamental class, in H^n coordinates
  SparseVector omega;        // cocycle representing it
  /// pairings[p]: column i = (Omega-coefficient of a_i b_j)_j for the
  /// representatives a_i of H^p and b_j of H^{n-p}.
  std::vector<SparseMatrix> pairings;
  /// Whether H was seen to vanish on a window above n at least as long as
  /// the widest generator degree (always true for finite algebras).
  bool window_clear = false;
  int certified_high = 0;
};

struct PdCheck {
  bool pd = false;
  std::optional<PdCertificate> certificate;
  std::string reason;
  std::optional<int> witness_degree;
  SparseVector witness_class;
  SparseVector witness_cocycle;
  std::string witness;  // formatted witness cocycle
};

/// Cup product of two classes, in class coordinates of H^{p+q}. Products
/// above the computed range are reported as nullopt.
inline std::optional<SparseVector> cup_product(const Cdga& a, const CohomologyData& h, int p, const SparseVector& x,
                                               int q, const SparseVector& y) {
  if (!h.covers(p + q)) return std::nullopt;
  SparseVector prod = a.multiply(p, h.at(p).cocycle_of(x), q, h.at(q).cocycle_of(y));
  auto cls = h.at(p + q).class_of(prod);
  if (!cls) throw InputError("product of cocycles is not a cocycle in degree " + std::to_string(p + q));
  return cls;
}

/// Decides whether H(A) satisfies Poincare duality. The top degree n is the
/// highest nonzero degree of the computed cohomology; it must lie strictly
/// below the last certified degree unless the algebra is finite. When
/// dim H^n > 1 the last class plays the role of Omega so that a degenerate
/// class can still be exhibited.
inline PdCheck detect_pd(const Cdga& a, const CohomologyData& h, std::optional<int> window = std::nullopt) {
  PdCheck out;
  auto top = h.top_degree();
  if (!top) {
    out.reason = "cohomology is zero";
    return out;
  }
  const int n = *top;
  if (h.low() > 0) throw InputError("cohomology must start in degree 0");
  if (!a.finite() && n >= h.high()) {
    out.reason = "cohomology is nonzero in degree " + std::to_string(n) +
                 ", the last certified degree: no top class can be located below the cap";
    out.witness_degree = n;
    out.witness_class = SparseVector::unit(0);
    out.witness_cocycle = h.at(n).representatives().front();
    out.witness = a.format(n, out.witness_cocycle);
    return out;
  }
  int width = window.value_or(1);
  if (!window && a.has_model()) width = std::max(1, a.model().max_generator_degree());

  const std::size_t top_dim = h.betti(n);
  PdCertificate cert;
  cert.n = n;
  cert.omega_class = SparseVector::unit(top_dim - 1);
  cert.omega = h.at(n).cocycle_of(cert.omega_class);
  cert.window_clear = a.finite() || h.high() - n >= width;
  cert.certified_high = h.high();
  std::string degenerate;
  for (int p = 0; p <= n; ++p) {
    std::vector<SparseVector> cols;
    for (std::size_t i = 0; i < h.betti(p); ++i) {
      SparseVector col;
      for (std::size_t j = 0; j < h.betti(n - p); ++j) {
        auto prod = cup_product(a, h, p, SparseVector::unit(i), n - p, SparseVector::unit(j));
        col.add_to(j, prod->get(top_dim - 1));
      }
      cols.push_back(std::move(col));
    }
    SparseMatrix m = SparseMatrix::from_columns(h.betti(n - p), std::move(cols));
    auto rk = rank_kernel_image(m);
    if (!rk.kernel.empty() && degenerate.empty()) {
      out.witness_degree = p;
      out.witness_class = rk.kernel.front();
      out.witness_cocycle = h.at(p).cocycle_of(out.witness_class);
      out.witness = a.format(p, out.witness_cocycle);
      degenerate = "the class [" + out.witness + "] in degree " + std::to_string(p) +
                   " pairs to zero with all of H^" + std::to_string(n - p);
    }
    cert.pairings.push_back(std::move(m));
  }
  if (top_dim != 1) {
    out.reason = "dim H^" + std::to_string(n) + " = " + std::to_string(top_dim) + " (no unique fundamental class)";
    if (!degenerate.empty()) out.reason += "; " + degenerate;
    return out;
  }
  if (!degenerate.empty()) {
    out.reason = degenerate;
    return out;
  }
  out.pd = true;
  out.reason = cert.window_clear ? "Poincare duality of formal dimension " + std::to_string(n)
                                 : "Poincare duality of formal dimension " + std::to_string(n) + " up to cap";
  out.certificate = std::move(cert);
  return out;
}

/// The fundamental cocycle omega, a complement S of Q.omega in R^n containing
/// d(R^{n-1}) + K^n, and the functional omega# on R^n.
struct OmegaChoice {
  int n = 0;
  SparseVector omega;
  std::vector<SparseVector> complement;
  SparseVector functional;  // omega#(x) = functional . x for x in R^n
};

inline OmegaChoice choose_omega_complement(const Cdga& r, const PdCertificate& cert,
                                           const DegreewiseIdeal* kernel = nullptr) {
  const int n = cert.n;
  if (n > r.top()) throw InputError("formal dimension beyond the truncation");
  const std::size_t dim = r.dim(n);
  Reducer red(dim, true);
  std::vector<SparseVector> subspace;
  if (n > 0) {
    for (const auto& c : r.d(n - 1).columns()) {
      if (red.insert(c)) subspace.push_back(c);
    }
  }
  if (kernel) {
    for (const auto& v : kernel->basis.at(n)) {
      if (red.insert(v)) subspace.push_back(v);
    }
  }
  const std::size_t omega_input = red.inputs();
  if (!red.insert(cert.omega)) {
    throw PreconditionError(
        "the fundamental class lies in d(R^{n-1}) + K^n: H(f) is not injective in the top degree, which the "
        "retraction theorem requires");
  }
  OmegaChoice out;
  out.n = n;
  out.omega = cert.omega;
  out.complement = subspace;
  for (std::size_t j = 0; j < dim && red.rank() < dim; ++j) {
    auto e = SparseVector::unit(j);
    if (red.insert(e)) out.complement.push_back(std::move(e));
  }
  for (std::size_t j = 0; j < dim; ++j) {
    auto c = red.coordinates(SparseVector::unit(j));
    out.functional.add_to(j, c->get(omega_input));
  }
  return out;
}

/// phi: R -> Hom(R, Q), phi(a)(b) = omega#(a b); phi_hat = s^{-n} phi, a
/// degree-0 map into the suspended dual; optionally l with l q = phi_hat.
struct DualityMorphisms {
  int n = 0;
  std::shared_ptr<const Cdga> algebra;
  DgModule regular;
  DgModule dual;
  DgModule suspended_dual;
  GradedMap phi;      // degree -n
  GradedMap phi_hat;  // degree 0
  std::optional<GradedMap> l;

  // verification
  bool omega_normalized = false;       // omega#(omega) = 1
  bool omega_kills_boundaries = false; // omega# d = 0 on R^{n-1}
  std::optional<std::string> chain_defect;
  std::optional<std::string> module_defect;
  IsoResult quasi_iso;
  int quasi_iso_high = 0;
  std::optional<bool> kernel_killed;   // phi(K) = 0, when K was supplied
  std::optional<bool> factorization;   // l q = phi_hat, when q was supplied

  bool ok() const {
    return omega_normalized && omega_kills_boundaries && !chain_defect && !module_defect && quasi_iso.iso &&
           kernel_killed.value_or(true) && factorization.value_or(true);
  }
};

/// Matrix of phi on degree p: column i is the functional b -> omega#(a_i b)
/// on R^{n-p}.
inline SparseMatrix duality_block(const Cdga& r, const OmegaChoice& choice, int p) {
  const int n = choice.n;
  std::vector<SparseVector> cols;
  for (std::size_t i = 0; i < r.dim(p); ++i) {
    SparseVector col;
    for (std::size_t j = 0; j < r.dim(n - p); ++j) {
      Scalar v = choice.functional.dot(r.product(p, i, n - p, j));
      if (v != 0) col.add_to(j, v);
    }
    cols.push_back(std::move(col));
  }
  return SparseMatrix::from_columns(r.dim(n - p), std::move(cols));
}

/// Builds phi and phi_hat and verifies them. `kernel` is K = ker q and
/// `q` the surjection R -> B through which phi_hat should factor.
inline DualityMorphisms build_duality_morphisms(const std::shared_ptr<const Cdga>& r, const OmegaChoice& choice,
                                                const DegreewiseIdeal* kernel = nullptr,
                                                const CdgaMorphism* q = nullptr) {
  const int n = choice.n;
  DualityMorphisms out;
  out.n = n;
  out.algebra = r;
  out.regular = regular_module(r);
  out.dual = dual_module(r);
  out.suspended_dual = suspend_module(out.dual, n);
  out.phi = GradedMap(-n);
  out.phi_hat = GradedMap(0);
  for (int p = 0; p <= n; ++p) {
    SparseMatrix blk = duality_block(*r, choice, p);
    out.phi.set_block(p, blk);
    out.phi_hat.set_block(p, std::move(blk));
  }

  out.omega_normalized = choice.functional.dot(choice.omega) == 1;
  out.omega_kills_boundaries = true;
  if (n > 0) {
    for (const auto& c : r->d(n - 1).columns()) {
      if (choice.functional.dot(c) != 0) out.omega_kills_boundaries = false;
    }
  }
  out.chain_defect = module_chain_map_defect(out.regular, out.suspended_dual, out.phi_hat);
  out.module_defect = module_morphism_defect(out.regular, out.suspended_dual, out.phi_hat);
  out.quasi_iso_high = r->cap();
  out.quasi_iso = is_iso_on_H(out.phi_hat, out.regular.complex(), out.suspended_dual.complex(), 0, r->cap());

  if (kernel) {
    bool killed = true;
    for (int p = 0; p <= n; ++p) {
      for (const auto& v : kernel->basis.at(p)) {
        if (!out.phi_hat.apply(p, v).is_zero()) killed = false;
      }
    }
    out.kernel_killed = killed;
  }
  if (q) {
    const Cdga& b = q->target();
    GradedMap l(0);
    bool factors = true;
    for (int k = 0; k <= n && k <= b.top(); ++k) {
      SparseMatrix qk = q->matrices().block(k, b.dim(k), r->dim(k));
      std::vector<SparseVector> cols;
      for (std::size_t j = 0; j < b.dim(k); ++j) {
        auto x = solve_linear(qk, SparseVector::unit(j));
        if (!x) throw PreconditionError("q is not surjective in degree " + std::to_string(k));
        cols.push_back(out.phi_hat.apply(k, *x));
      }
      SparseMatrix lk = SparseMatrix::from_columns(r->dim(n - k), std::move(cols));
      if (!(lk * qk == out.phi_hat.block(k, r->dim(n - k), r->dim(k)))) factors = false;
      l.set_block(k, std::move(lk));
    }
    out.factorization = factors;
    out.l = std::move(l);
  }
  return out;
}

}  // namespace sectcat
