#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "sectcat/invariants.hpp"
#include "sectcat/model_parser.hpp"
#include "sectcat/report.hpp"

namespace sectcat {

struct RunOptions {
  std::optional<int> cap;     // default: 6 * max generator degree
  std::optional<int> budget;  // default: twice the formal dimension
  std::optional<int> power;   // n for `retract`
  bool timing = false;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"cohomology", "pd-check", "cup-length", "e0",
                                              "htc",        "mtc",      "verify-theorem", "retract"};
  return names;
}

/// Default cap: six times the largest generator degree (at least 2).
inline int default_cap(const SullivanModel& m) { return std::max(2, 6 * m.max_generator_degree()); }

namespace detail {

inline ordered_json sweep_json(const std::vector<SweepEntry>& sweep) {
  ordered_json out = ordered_json::array();
  for (const auto& s : sweep) {
    ordered_json j;
    j["n"] = s.n;
    j["injective"] = s.injective;
    j["failing_degree"] = s.failing_degree ? ordered_json(*s.failing_degree) : ordered_json(nullptr);
    j["witness"] = s.witness;
    out.push_back(std::move(j));
  }
  return out;
}

inline ordered_json outcome_json(const RetractionOutcome& o) {
  ordered_json j;
  j["status"] = to_string(o.status);
  j["message"] = o.message;
  j["injective"] = o.injectivity.injective;
  j["poincare_duality"] = o.pd.pd;
  j["duality_verified"] = o.duality_ok;
  j["kernel_killed"] = o.kernel_killed ? ordered_json(*o.kernel_killed) : ordered_json(nullptr);
  j["factorization"] = o.factorization ? ordered_json(*o.factorization) : ordered_json(nullptr);
  j["contractible_generators"] = o.adjoined_contractible;
  j["semifree_generators"] = o.semifree_generators;
  j["stages"] = o.stages;
  ordered_json checks = ordered_json::array();
  if (o.verification) {
    for (const auto& c : o.verification->checks) {
      checks.push_back(ordered_json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
  }
  j["checks"] = std::move(checks);
  j["bottom_triangle_rank"] = o.bottom_triangle_rank ? ordered_json(*o.bottom_triangle_rank) : ordered_json(nullptr);
  return j;
}

inline ordered_json attempts_json(const std::vector<MtcAttempt>& attempts) {
  ordered_json out = ordered_json::array();
  for (const auto& a : attempts) {
    ordered_json j = outcome_json(a.outcome);
    j["n"] = a.n;
    j["status"] = a.status;
    out.push_back(std::move(j));
  }
  return out;
}

inline void absorb(Report& r, const InvariantReport& inv) {
  r.value = inv.value ? ordered_json(*inv.value) : ordered_json(nullptr);
  r.complete = inv.complete;
  r.status = inv.status;
  r.witnesses = inv.witnesses;
  r.notes.insert(r.notes.end(), inv.notes.begin(), inv.notes.end());
  if (inv.lower_bound) r.details["lower_bound"] = *inv.lower_bound;
  r.exit_code = inv.value && inv.complete && inv.status == "determined" ? exit_determinate : exit_undetermined;
}

inline std::string value_text(const std::string& name, const InvariantReport& inv) {
  if (inv.value) return name + " = " + std::to_string(*inv.value);
  if (inv.lower_bound) return name + " >= " + std::to_string(*inv.lower_bound) + " (budget exhausted)";
  return name + " undetermined";
}

}  // namespace detail

/// Runs one command on a model. Throws InputError for unusable arguments.
inline Report run(const std::string& command, const SullivanModel& model, const std::string& label,
                  const RunOptions& options = {}) {
  if (std::find(command_names().begin(), command_names().end(), command) == command_names().end()) {
    throw InputError("unknown command '" + command + "'");
  }
  const auto started = std::chrono::steady_clock::now();
  const int cap = options.cap.value_or(default_cap(model));
  if (options.budget && *options.budget < 0) throw InputError("budget must be non-negative");
  InvariantEngine e(model, cap);
  Report r;
  r.command = command;
  r.model = label;
  r.cap = cap;

  if (command == "cohomology") {
    const auto& h = e.cohomology_of_model();
    ordered_json betti = ordered_json::array();
    ordered_json reps = ordered_json::array();
    std::string line;
    for (int k = 0; k <= cap; ++k) {
      betti.push_back(h.betti(k));
      line += (k ? " " : "") + std::to_string(h.betti(k));
      if (h.betti(k) == 0) continue;
      ordered_json deg;
      deg["degree"] = k;
      deg["representatives"] = ordered_json::array();
      for (const auto& z : h.at(k).representatives()) deg["representatives"].push_back(e.algebra().format(k, z));
      reps.push_back(std::move(deg));
    }
    r.value = betti;
    r.details["classes"] = std::move(reps);
    r.complete = true;
    r.status = "determined";
    r.summary = "Betti numbers in degrees 0.." + std::to_string(cap) + ": " + line;
  } else if (command == "pd-check") {
    const auto& pd = e.pd();
    if (pd.pd) {
      const auto& cert = *pd.certificate;
      r.value = cert.n;
      r.complete = cert.window_clear;
      r.status = cert.window_clear ? "poincare_duality" : "pd_up_to_cap";
      r.witnesses.push_back("fundamental class [" + e.algebra().format(cert.n, cert.omega) + "] in degree " +
                            std::to_string(cert.n));
      r.summary = "Poincare duality algebra of formal dimension " + std::to_string(cert.n) +
                  (cert.window_clear ? "" : " (up to cap: H vanishes on too short a window above the top class)");
      r.exit_code = cert.window_clear ? exit_determinate : exit_undetermined;
    } else {
      r.status = "refused";
      // a degenerate pairing is definitive; cohomology running into the cap is not
      const auto top = e.cohomology_of_model().top_degree();
      r.complete = !(top && *top >= cap);
      if (!pd.witness.empty()) {
        r.witnesses.push_back("[" + pd.witness + "] in degree " + std::to_string(*pd.witness_degree));
      }
      r.notes.push_back(pd.reason);
      r.summary = "NOT a Poincare duality algebra: " + pd.reason;
      r.exit_code = exit_refused;
    }
  } else if (command == "cup-length") {
    auto inv = nil_ker_report(e);
    detail::absorb(r, inv);
    r.summary = detail::value_text("nil ker H(mu)", inv);
  } else if (command == "e0") {
    const int b = options.budget.value_or(e.default_budget());
    auto sweep = toomer_sweep(e, b);
    auto inv = detail::sweep_report("e0", sweep, cap, e.model_cap_sufficient(), b);
    detail::absorb(r, inv);
    r.details["sweep"] = detail::sweep_json(sweep);
    r.summary = detail::value_text("e0", inv);
  } else if (command == "htc") {
    const int b = options.budget.value_or(e.default_budget());
    auto sweep = htc_sweep(e, b);
    auto inv = detail::sweep_report("htc", sweep, cap, e.square_cap_sufficient(), b);
    detail::absorb(r, inv);
    r.details["sweep"] = detail::sweep_json(sweep);
    r.summary = detail::value_text("htc", inv);
  } else if (command == "mtc") {
    const int b = options.budget.value_or(e.default_budget());
    auto sweep = mtc_sweep(e, b);
    r.details["attempts"] = detail::attempts_json(sweep.attempts);
    r.complete = e.square_cap_sufficient();
    if (sweep.value) {
      r.value = *sweep.value;
      r.status = "retraction_built";
      r.summary = "mtc* = " + std::to_string(*sweep.value);
      r.exit_code = r.complete ? exit_determinate : exit_undetermined;
      if (*sweep.value > 0) {
        const auto& prev = sweep.attempts[*sweep.value - 1];
        r.witnesses.push_back("n = " + std::to_string(prev.n) + ": " + prev.outcome.message);
      }
    } else {
      r.status = "undetermined_at_cap";
      r.complete = false;
      r.summary = "mtc* undetermined at cap " + std::to_string(cap);
      if (!sweep.attempts.empty()) r.witnesses.push_back(sweep.attempts.back().outcome.message);
      r.exit_code = exit_undetermined;
    }
  } else if (command == "verify-theorem") {
    auto t = verify_theorem(e, options.budget);
    r.status = t.status;
    r.complete = t.complete;
    r.witnesses = t.htc.witnesses;
    r.notes = t.htc.notes;
    r.details["htc"] = t.htc.value ? ordered_json(*t.htc.value) : ordered_json(nullptr);
    r.details["mtc_star"] = t.mtc_star ? ordered_json(*t.mtc_star) : ordered_json(nullptr);
    r.details["message"] = t.message;
    r.details["sweep"] = detail::sweep_json(t.sweep);
    r.details["attempts"] = detail::attempts_json(t.attempts);
    if (t.status == "verified") {
      r.value = *t.mtc_star;
      r.summary = "htc = mtc* = " + std::to_string(*t.mtc_star) + ": VERIFIED";
      r.exit_code = exit_determinate;
    } else if (t.status == "refused") {
      r.summary = "REFUSED: " + t.message;
      r.exit_code = exit_refused;
    } else if (t.status == "violated") {
      r.summary = "VIOLATED: " + t.message;
      r.exit_code = exit_refused;
    } else {
      r.summary = "INCONCLUSIVE: " + t.message;
      r.exit_code = exit_undetermined;
    }
  } else if (command == "retract") {
    if (!options.power) throw InputError("retract needs --power N");
    if (*options.power < 0) throw InputError("--power must be non-negative");
    auto outcome = build_homotopy_retraction(e.projection(*options.power), cap);
    r.details = detail::outcome_json(outcome);
    r.details["n"] = *options.power;
    r.status = to_string(outcome.status);
    r.complete = e.square_cap_sufficient();
    r.summary = "p_" + std::to_string(*options.power) + ": " + outcome.message;
    switch (outcome.status) {
      case RetractionStatus::built:
        r.value = *options.power;
        r.exit_code = exit_determinate;
        break;
      case RetractionStatus::not_injective:
      case RetractionStatus::not_pd:
        r.exit_code = exit_refused;
        break;
      default: r.exit_code = exit_undetermined; break;
    }
    if (!outcome.injectivity.injective) {
      r.witnesses.push_back("kernel class in degree " + std::to_string(*outcome.injectivity.failing_degree) + ": [" +
                            e.square().square_algebra.format(*outcome.injectivity.failing_degree,
                                                             outcome.injectivity.witness_cocycle) +
                            "]");
    }
  }
  for (auto& n : e.truncation_notes()) {
    if (std::find(r.notes.begin(), r.notes.end(), n) == r.notes.end()) r.notes.push_back(std::move(n));
  }
  if (options.timing) {
    r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  }
  return r;
}

}  // namespace sectcat
