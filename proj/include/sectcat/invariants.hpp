#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sectcat/retraction.hpp"

namespace sectcat {

/// A computed invariant together with the cap it was computed at and
/// whether that cap provably suffices.
struct InvariantReport {
  std::string name;
  std::optional<int> value;        // nullopt when undetermined
  std::optional<int> lower_bound;  // set when the search budget ran out
  int cap = 0;
  bool complete = false;
  std::string status;  // determined | budget_exhausted | undetermined_at_cap | refused
  std::vector<std::string> witnesses;
  std::vector<std::string> notes;
};

/// One step of an n-sweep: whether H(projection_n) is injective, with the
/// failing class when it is not.
struct SweepEntry {
  int n = 0;
  bool injective = false;
  std::optional<int> failing_degree;
  std::string witness;
};

// ---------------------------------------------------------------------------
// nil ker
// ---------------------------------------------------------------------------

struct NilKerResult {
  int value = 0;
  bool complete = true;  // false when a product left the computed range
  std::vector<std::size_t> power_dims;  // total dimension of K^1, K^2, ...
  std::string witness;                  // a nonzero product of maximal length
  std::optional<int> witness_degree;
};

/// Nilpotency of ker H(f) inside H(A): the largest m such that some m-fold
/// product of kernel classes is nonzero (0 when the kernel is zero).
/// Products are formed on representatives and reduced to classes.
inline NilKerResult nil_ker(const Cdga& a, const CohomologyData& h, const InducedMap& hf) {
  NilKerResult out;
  const int lo = h.low(), hi = h.high();
  std::map<int, std::vector<SparseVector>> first, current;
  for (int k = std::max(lo, 1); k <= hi; ++k) {
    auto it = hf.blocks.find(k);
    if (it == hf.blocks.end()) throw InputError("induced map missing degree " + std::to_string(k));
    auto ker = rank_kernel_image(it->second).kernel;
    if (!ker.empty()) first[k] = std::move(ker);
  }
  current = first;
  auto total = [](const std::map<int, std::vector<SparseVector>>& m) {
    std::size_t t = 0;
    for (const auto& [k, v] : m) t += v.size();
    return t;
  };
  auto note_witness = [&](const std::map<int, std::vector<SparseVector>>& m) {
    if (m.empty()) return;
    const auto& [k, v] = *m.begin();
    out.witness_degree = k;
    out.witness = a.format(k, h.at(k).cocycle_of(v.front()));
  };
  if (current.empty()) return out;
  out.value = 1;
  out.power_dims.push_back(total(current));
  note_witness(current);
  while (true) {
    std::map<int, std::vector<SparseVector>> next;
    std::map<int, Reducer> spans;
    for (const auto& [i, xs] : current) {
      for (const auto& [j, ys] : first) {
        const int k = i + j;
        if (k > hi) {
          out.complete = false;
          continue;
        }
        auto [it, inserted] = spans.try_emplace(k, h.betti(k));
        for (const auto& x : xs) {
          for (const auto& y : ys) {
            auto prod = cup_product(a, h, i, x, j, y);
            if (prod && !prod->is_zero() && it->second.insert(*prod)) next[k].push_back(std::move(*prod));
          }
        }
      }
    }
    if (next.empty()) break;
    ++out.value;
    out.power_dims.push_back(total(next));
    note_witness(next);
    current = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Engine: shared, cached data for one model at one cap
// ---------------------------------------------------------------------------

/// Caches the algebra, its tensor square, their cohomology and the powers of
/// ker mu for a model at a fixed cap. Results are valid up to degree cap:
/// every algebra is stored through cap + 1. An engine fills its caches
/// lazily and is meant to be used from a single thread.
class InvariantEngine {
 public:
  InvariantEngine(SullivanModel model, int cap) : model_(std::move(model)), cap_(cap) {
    if (cap < 1) throw InputError("cap must be at least 1");
  }

  const SullivanModel& model() const { return model_; }
  int cap() const { return cap_; }

  const Cdga& algebra() {
    if (!algebra_) algebra_ = std::make_shared<const Cdga>(Cdga::from_model(model_, cap_ + 1));
    return *algebra_;
  }
  const CohomologyData& cohomology_of_model() {
    if (!h_) h_ = cohomology(algebra(), cap_);
    return *h_;
  }
  const PdCheck& pd() {
    if (!pd_) pd_ = detect_pd(algebra(), cohomology_of_model());
    return *pd_;
  }
  std::optional<int> formal_dimension() {
    if (pd().pd) return pd().certificate->n;
    return std::nullopt;
  }

  const TensorSquare& square() {
    if (!square_) square_ = std::make_unique<TensorSquare>(tensor_square(model_, cap_));
    return *square_;
  }
  const CohomologyData& cohomology_of_square() {
    if (!hsq_) hsq_ = cohomology(square().square_algebra, cap_);
    return *hsq_;
  }
  const PdCheck& square_pd() {
    if (!square_pd_) square_pd_ = detect_pd(square().square_algebra, cohomology_of_square());
    return *square_pd_;
  }

  /// (ker mu)^m, built incrementally from the previous power.
  const DegreewiseIdeal& kernel_power(int m) {
    if (m < 1) throw InputError("ideal power must be at least 1");
    if (powers_.empty()) powers_.push_back(kernel_ideal(square().mu));
    while (static_cast<int>(powers_.size()) < m) {
      powers_.push_back(ideal_product(square().square_algebra, powers_.back(), powers_.front()));
    }
    return powers_[m - 1];
  }

  /// p_n: Lambda V (x) Lambda V -> (Lambda V (x) Lambda V) / (ker mu)^{n+1}.
  CdgaMorphism projection(int n) {
    const auto& a = square().square_algebra;
    return projection_morphism(a, quotient_by_ideal(a, kernel_power(n + 1)));
  }

  /// Whether the cap provably suffices for injectivity questions about H of
  /// the tensor square: H(Lambda V) is Poincare with formal dimension N,
  /// cap >= 2N + max generator degree + 1, and H of the square vanishes on
  /// (2N, cap].
  bool square_cap_sufficient() {
    auto n = formal_dimension();
    if (!n) return false;
    if (cap_ < 2 * *n + model_.max_generator_degree() + 1) return false;
    const auto& h = cohomology_of_square();
    for (int k = 2 * *n + 1; k <= cap_; ++k) {
      if (h.betti(k) != 0) return false;
    }
    return true;
  }

  /// The analogous rule for Lambda V itself: cap >= N + max degree + 1 and
  /// H(Lambda V) zero on (N, cap].
  bool model_cap_sufficient() {
    auto n = formal_dimension();
    if (!n) return false;
    if (cap_ < *n + model_.max_generator_degree() + 1) return false;
    const auto& h = cohomology_of_model();
    for (int k = *n + 1; k <= cap_; ++k) {
      if (h.betti(k) != 0) return false;
    }
    return true;
  }

  /// Default n budget: twice the formal dimension, or the cap when H is not
  /// Poincare.
  int default_budget() {
    auto n = formal_dimension();
    return n ? std::max(1, 2 * *n) : cap_;
  }

  /// Notes about the truncation worth surfacing in every report.
  std::vector<std::string> truncation_notes() {
    std::vector<std::string> out;
    for (const auto& g : model_.generators()) {
      if (2 * g.degree > cap_) {
        out.push_back("generator " + g.name + " has degree " + std::to_string(g.degree) +
                      " above cap/2; products involving it are truncated");
      }
    }
    return out;
  }

 private:
  SullivanModel model_;
  int cap_;
  std::shared_ptr<const Cdga> algebra_;
  std::optional<CohomologyData> h_;
  std::optional<PdCheck> pd_;
  std::unique_ptr<TensorSquare> square_;
  std::optional<CohomologyData> hsq_;
  std::optional<PdCheck> square_pd_;
  std::vector<DegreewiseIdeal> powers_;
};

// ---------------------------------------------------------------------------
// Invariants
// ---------------------------------------------------------------------------

/// nil ker of H(mu): H(Lambda V (x) Lambda V) -> H(Lambda V).
inline InvariantReport nil_ker_report(InvariantEngine& e) {
  InvariantReport r;
  r.name = "nil_ker";
  r.cap = e.cap();
  const auto& ts = e.square();
  const auto& hs = e.cohomology_of_square();
  auto hmu = induced_map(ts.mu.matrices(), hs, e.cohomology_of_model(), 0, e.cap());
  auto nk = nil_ker(ts.square_algebra, hs, hmu);
  r.value = nk.value;
  r.complete = e.square_cap_sufficient();
  r.status = "determined";
  if (nk.witness_degree) {
    r.witnesses.push_back("nonzero " + std::to_string(nk.value) + "-fold product in degree " +
                          std::to_string(*nk.witness_degree) + ": " + nk.witness);
  }
  if (!nk.complete && !r.complete) r.notes.push_back("some products fall above the cap");
  for (auto& n : e.truncation_notes()) r.notes.push_back(std::move(n));
  return r;
}

namespace detail {

inline SweepEntry sweep_entry(int n, const Cdga& source, const CohomologyData& hs, const QuotientComplex& q, int cap) {
  SweepEntry s;
  s.n = n;
  auto hq = cohomology(q.quotient, cap);
  auto inj = is_injective_on_H(induced_map(q.projection, hs, hq, 0, cap), hs, 0, cap);
  s.injective = inj.injective;
  if (!inj.injective) {
    s.failing_degree = inj.failing_degree;
    s.witness = source.format(*inj.failing_degree, inj.witness_cocycle);
  }
  return s;
}

inline InvariantReport sweep_report(const std::string& name, const std::vector<SweepEntry>& sweep, int cap,
                                    bool cap_sufficient, int budget) {
  InvariantReport r;
  r.name = name;
  r.cap = cap;
  std::optional<int> least;
  for (const auto& s : sweep) {
    if (s.injective) {
      least = s.n;
      break;
    }
  }
  if (least) {
    r.value = *least;
    r.status = "determined";
    r.complete = cap_sufficient;
    if (*least > 0) {
      const auto& prev = sweep[*least - 1];
      r.witnesses.push_back("n = " + std::to_string(prev.n) + " is not injective in degree " +
                            std::to_string(*prev.failing_degree) + ": [" + prev.witness + "]");
    }
  } else {
    r.lower_bound = budget + 1;
    r.status = "budget_exhausted";
    r.complete = false;
    if (!sweep.empty() && sweep.back().failing_degree) {
      r.witnesses.push_back("n = " + std::to_string(sweep.back().n) + " is not injective in degree " +
                            std::to_string(*sweep.back().failing_degree) + ": [" + sweep.back().witness + "]");
    }
  }
  bool seen = false;
  for (const auto& s : sweep) {
    if (seen && !s.injective) {
      r.notes.push_back("monotonicity violated at n = " + std::to_string(s.n));
      r.status = "monotonicity_violated";
    }
    seen = seen || s.injective;
  }
  return r;
}

}  // namespace detail

/// Injectivity of H(p_n) for n = 0..budget.
inline std::vector<SweepEntry> htc_sweep(InvariantEngine& e, int budget) {
  std::vector<SweepEntry> out;
  const auto& a = e.square().square_algebra;
  const auto& hs = e.cohomology_of_square();
  for (int n = 0; n <= budget; ++n) {
    out.push_back(detail::sweep_entry(n, a, hs, quotient_by_ideal(a, e.kernel_power(n + 1)), e.cap()));
  }
  return out;
}

/// Injectivity of H(Lambda V -> Lambda V / Lambda^{>n} V) for n = 0..budget.
inline std::vector<SweepEntry> toomer_sweep(InvariantEngine& e, int budget) {
  std::vector<SweepEntry> out;
  const auto& a = e.algebra();
  const auto& h = e.cohomology_of_model();
  for (int n = 0; n <= budget; ++n) out.push_back(detail::sweep_entry(n, a, h, word_length_quotient(a, n), e.cap()));
  return out;
}

/// Least n with H(p_n) injective; the whole sweep is run so monotonicity is
/// checked every time.
inline InvariantReport htc(InvariantEngine& e, std::optional<int> budget = std::nullopt) {
  const int b = budget.value_or(e.default_budget());
  auto r = detail::sweep_report("htc", htc_sweep(e, b), e.cap(), e.square_cap_sufficient(), b);
  for (auto& n : e.truncation_notes()) r.notes.push_back(std::move(n));
  return r;
}

/// Least n with the word-length projection injective on cohomology.
inline InvariantReport toomer_e0(InvariantEngine& e, std::optional<int> budget = std::nullopt) {
  const int b = budget.value_or(e.default_budget());
  auto r = detail::sweep_report("e0", toomer_sweep(e, b), e.cap(), e.model_cap_sufficient(), b);
  for (auto& n : e.truncation_notes()) r.notes.push_back(std::move(n));
  return r;
}

// ---------------------------------------------------------------------------
// mtc and the theorem
// ---------------------------------------------------------------------------

struct MtcAttempt {
  int n = 0;
  std::string status;  // retraction_built | no_retraction_at_cap | undetermined
  RetractionOutcome outcome;
};

/// Runs the retraction pipeline on p_n. The lift is attempted even when H(p_n)
/// is not injective, so a negative answer is backed by an inconsistent
/// linear system and not only by the cohomological obstruction.
inline MtcAttempt mtc_attempt(InvariantEngine& e, int n) {
  MtcAttempt out;
  out.n = n;
  RetractionOptions options;
  options.attempt_without_hypotheses = true;
  out.outcome = build_homotopy_retraction(e.projection(n), e.cap(), options);
  switch (out.outcome.status) {
    case RetractionStatus::built: out.status = "retraction_built"; break;
    case RetractionStatus::no_retraction_at_cap: out.status = "no_retraction_at_cap"; break;
    default: out.status = "undetermined"; break;
  }
  return out;
}

/// Least n with a verified module retraction of p_n, or the first n where the
/// answer could not be decided.
struct MtcSweep {
  std::vector<MtcAttempt> attempts;
  std::optional<int> value;
  bool decided = true;
};

inline MtcSweep mtc_sweep(InvariantEngine& e, int budget) {
  MtcSweep out;
  for (int n = 0; n <= budget; ++n) {
    out.attempts.push_back(mtc_attempt(e, n));
    const auto& s = out.attempts.back().status;
    if (s == "retraction_built") {
      out.value = n;
      return out;
    }
    if (s == "undetermined") {
      out.decided = false;
      return out;
    }
  }
  out.decided = false;
  return out;
}

struct TheoremReport {
  std::string status;  // verified | inconclusive | refused | violated
  std::string message;
  InvariantReport htc;
  std::optional<int> mtc_star;
  std::vector<MtcAttempt> attempts;
  std::vector<SweepEntry> sweep;
  bool complete = false;
};

/// htc (least n with H(p_n) injective) against mtc* (least n with a verified
/// module retraction of p_n), on Poincare duality inputs.
inline TheoremReport verify_theorem(InvariantEngine& e, std::optional<int> budget = std::nullopt) {
  TheoremReport out;
  const auto& spd = e.square_pd();
  if (!spd.pd) {
    out.status = "refused";
    out.message = "H(Lambda V (x) Lambda V) is not a Poincare duality algebra: " + spd.reason;
    out.htc.name = "htc";
    out.htc.cap = e.cap();
    out.htc.status = "refused";
    if (!spd.witness.empty()) out.htc.witnesses.push_back(spd.witness);
    return out;
  }
  const int b = budget.value_or(e.default_budget());
  out.sweep = htc_sweep(e, b);
  out.htc = detail::sweep_report("htc", out.sweep, e.cap(), e.square_cap_sufficient(), b);
  auto mtc = mtc_sweep(e, b);
  out.attempts = std::move(mtc.attempts);
  out.mtc_star = mtc.value;
  out.complete = out.htc.complete;
  if (!out.htc.value || !mtc.value || !mtc.decided) {
    out.status = "inconclusive";
    out.message = "htc or mtc* undetermined at cap " + std::to_string(e.cap());
    return out;
  }
  for (const auto& a : out.attempts) {
    if (a.status == "retraction_built" && !(a.outcome.verification && a.outcome.verification->passed())) {
      out.status = "inconclusive";
      out.message = "the retraction at n = " + std::to_string(a.n) + " failed verification";
      return out;
    }
  }
  if (*out.htc.value != *mtc.value) {
    out.status = "violated";
    out.message = "htc = " + std::to_string(*out.htc.value) + " but mtc* = " + std::to_string(*mtc.value);
    return out;
  }
  if (out.htc.status != "determined") {
    out.status = "inconclusive";
    out.message = "htc sweep not monotone";
    return out;
  }
  out.status = out.complete ? "verified" : "inconclusive";
  out.message = "htc = mtc* = " + std::to_string(*mtc.value) + (out.complete ? "" : " (cap not sufficient)");
  return out;
}

// ---------------------------------------------------------------------------
// Inequalities
// ---------------------------------------------------------------------------

struct InequalityCheck {
  std::string relation;
  std::optional<int> lhs;
  std::optional<int> rhs;
  bool holds = true;     // vacuous when a side is unknown
  bool decided = false;  // both sides known
};

struct InequalityAudit {
  InvariantReport nil_ker;
  InvariantReport htc;
  InvariantReport e0;
  std::vector<InequalityCheck> checks;
  bool violated() const {
    for (const auto& c : checks) {
      if (!c.holds) return true;
    }
    return false;
  }
};

inline InequalityAudit inequality_audit(InvariantEngine& e, std::optional<int> budget = std::nullopt) {
  InequalityAudit out;
  out.nil_ker = nil_ker_report(e);
  out.htc = htc(e, budget);
  out.e0 = toomer_e0(e, budget);
  auto le = [](std::string rel, std::optional<int> a, std::optional<int> b) {
    InequalityCheck c{std::move(rel), a, b, true, a && b};
    if (c.decided) c.holds = *a <= *b;
    return c;
  };
  out.checks.push_back(le("nil_ker <= htc", out.nil_ker.value, out.htc.value));
  std::optional<int> twice_e0;
  if (out.e0.value) twice_e0 = 2 * *out.e0.value;
  out.checks.push_back(le("htc <= 2 e0", out.htc.value, twice_e0));
  InequalityCheck mono{"H(p_n) injectivity monotone in n", std::nullopt, std::nullopt,
                       out.htc.status != "monotonicity_violated", true};
  out.checks.push_back(mono);
  InequalityCheck mono_e0{"word-length injectivity monotone in n", std::nullopt, std::nullopt,
                          out.e0.status != "monotonicity_violated", true};
  out.checks.push_back(mono_e0);
  return out;
}

}  // namespace sectcat
