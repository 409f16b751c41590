#include <catch_amalgamated.hpp>

#include <memory>

#include "sectcat/poincare.hpp"
#include "test_models.hpp"

using namespace sectcat;
using namespace sectcat::testing;

namespace {

/// Q + Q a + Q b with a, b in degree 2 and all products of a, b zero.
Cdga wedge_of_two_spheres() {
  GradedVectorSpace space(0, {{"1"}, {}, {"a", "b"}});
  auto rule = [](int, std::size_t, int, std::size_t) { return SparseVector{}; };
  return Cdga::explicit_algebra(space, {}, rule,
                                {Element{2, SparseVector::unit(0)}, Element{2, SparseVector::unit(1)}}, true,
                                {"a", "b"});
}

/// The ground field concentrated in degree 0.
Cdga rationals() {
  GradedVectorSpace space(0, {{"1"}});
  auto rule = [](int, std::size_t, int, std::size_t) { return SparseVector{}; };
  return Cdga::explicit_algebra(space, {}, rule, {}, true);
}

std::shared_ptr<const Cdga> shared(Cdga a) { return std::make_shared<const Cdga>(std::move(a)); }

}  // namespace

TEST_CASE("detect_pd on the documented examples", "[poincare]") {
  SECTION("S^2: n = 2, Omega = [x], pairing H^0 x H^2 = [1]") {
    auto a = Cdga::from_model(sphere2(), 8);
    auto r = detect_pd(a, cohomology(a));
    REQUIRE(r.pd);
    const auto& c = *r.certificate;
    CHECK(c.n == 2);
    CHECK(a.format(2, c.omega) == "x");
    CHECK(c.pairings[0] == SparseMatrix::identity(1));
    CHECK(c.window_clear);
  }
  SECTION("CP^2: n = 4, Omega = [x^2], pairing H^2 x H^2 = [1]") {
    auto a = Cdga::from_model(cp2().model, 12);
    auto r = detect_pd(a, cohomology(a));
    REQUIRE(r.pd);
    CHECK(r.certificate->n == 4);
    CHECK(a.format(4, r.certificate->omega) == "x^2");
    CHECK(r.certificate->pairings[2] == SparseMatrix::identity(1));
  }
  SECTION("Q + Qa + Qb is refused with witness a") {
    auto a = wedge_of_two_spheres();
    auto r = detect_pd(a, cohomology(a));
    CHECK_FALSE(r.pd);
    REQUIRE(r.witness_degree);
    CHECK(*r.witness_degree == 2);
    CHECK(r.witness == "a");
    CHECK(r.reason.find("dim H^2 = 2") != std::string::npos);
  }
  SECTION("Q[x] never reaches a top class below the cap") {
    SullivanModel poly({{"x", 2}}, {});
    // certified up to degree 10, where x^5 is still alive: refused
    auto a = Cdga::from_model(poly, 11);
    auto r = detect_pd(a, cohomology(a));
    CHECK_FALSE(r.pd);
    CHECK(r.witness == "x^5");
    // certified up to degree 9: x^4 looks like a top class, but the window
    // above it is too short to trust
    auto b = Cdga::from_model(poly, 10);
    auto r2 = detect_pd(b, cohomology(b));
    REQUIRE(r2.pd);
    CHECK_FALSE(r2.certificate->window_clear);
  }
  SECTION("every catalog model and its tensor square are PD") {
    for (const auto& entry : catalog()) {
      auto a = Cdga::from_model(entry.model, 2 * entry.formal_dimension + 6);
      auto r = detect_pd(a, cohomology(a));
      REQUIRE(r.pd);
      CHECK(r.certificate->n == entry.formal_dimension);
      auto ts = tensor_square(entry.model, 2 * entry.formal_dimension + entry.model.max_generator_degree() + 1);
      auto r2 = detect_pd(ts.square_algebra, cohomology(ts.square_algebra));
      REQUIRE(r2.pd);
      CHECK(r2.certificate->n == 2 * entry.formal_dimension);
      CHECK(r2.certificate->window_clear);
    }
  }
}

TEST_CASE("dual and suspended modules are DG modules", "[poincare][property]") {
  for (const auto& entry : catalog()) {
    auto a = shared(Cdga::from_model(entry.model, 10));
    auto reg = regular_module(a);
    CHECK_FALSE(reg.square_defect());
    CHECK_FALSE(reg.leibniz_defect());
    CHECK_FALSE(reg.commutativity_defect());
    auto dual = dual_module(a);
    CHECK_FALSE(dual.square_defect());
    CHECK_FALSE(dual.leibniz_defect());
    CHECK_FALSE(dual.commutativity_defect());
    for (int n : {0, 1, 2, 3, 5}) {
      auto s = suspend_module(dual, n);
      CHECK(s.low() == dual.low() + n);
      CHECK_FALSE(s.square_defect());
      CHECK_FALSE(s.leibniz_defect());
      CHECK_FALSE(s.commutativity_defect());
    }
  }
}

TEST_CASE("suspension bookkeeping", "[poincare]") {
  auto a = shared(Cdga::from_model(sphere2(), 8));
  auto dual = dual_module(a);
  SECTION("n = 0 is the identity") {
    auto s = suspend_module(dual, 0);
    for (int k = dual.low(); k < dual.high(); ++k) CHECK(s.d(k) == dual.d(k));
    for (std::size_t g = 0; g < a->generators().size(); ++g) {
      for (int k = dual.low(); k <= dual.high(); ++k) CHECK(s.action(g, k) == dual.action(g, k));
    }
  }
  SECTION("suspending by n then -n gives back the module") {
    for (int n : {1, 2, 3}) {
      auto back = suspend_module(suspend_module(dual, n), -n);
      CHECK(back.low() == dual.low());
      for (int k = dual.low(); k < dual.high(); ++k) CHECK(back.d(k) == dual.d(k));
      for (std::size_t g = 0; g < a->generators().size(); ++g) {
        for (int k = dual.low(); k <= dual.high(); ++k) CHECK(back.action(g, k) == dual.action(g, k));
      }
    }
  }
  SECTION("suspension of a chain map is a chain map") {
    auto reg = regular_module(a);
    GradedMap id(0);
    for (int k = 0; k <= a->top(); ++k) id.set_block(k, SparseMatrix::identity(a->dim(k)));
    auto sreg = suspend_module(reg, 3);
    GradedMap sid(0);
    for (int k = 0; k <= a->top(); ++k) sid.set_block(k + 3, SparseMatrix::identity(a->dim(k)));
    CHECK_FALSE(module_chain_map_defect(sreg, sreg, sid));
    CHECK_FALSE(module_morphism_defect(sreg, sreg, sid));
  }
}

TEST_CASE("choose_omega_complement", "[poincare]") {
  SECTION("S^2 with K = 0: omega = x, S = 0") {
    auto a = Cdga::from_model(sphere2(), 8);
    auto cert = *detect_pd(a, cohomology(a)).certificate;
    auto c = choose_omega_complement(a, cert);
    CHECK(a.format(2, c.omega) == "x");
    CHECK(c.complement.empty());
    CHECK(c.functional == SparseVector::unit(0));
  }
  SECTION("complement contains the coboundaries and omega# splits R^n") {
    auto ts = tensor_square(cp2().model, 14);
    const auto& r = ts.square_algebra;
    auto cert = *detect_pd(r, cohomology(r)).certificate;
    auto ideal = ideal_power_basis(ts, 5);
    auto c = choose_omega_complement(r, cert, &ideal);
    CHECK(c.functional.dot(c.omega) == 1);
    for (const auto& s : c.complement) CHECK(c.functional.dot(s) == 0);
    CHECK(c.complement.size() + 1 == r.dim(8));
    Reducer s_span(r.dim(8));
    for (const auto& s : c.complement) s_span.insert(s);
    for (const auto& b : r.d(7).columns()) CHECK(s_span.contains(b));
    for (const auto& k : ideal.basis[8]) CHECK(s_span.contains(k));
  }
  SECTION("K = whole positive part violates the hypothesis") {
    auto a = Cdga::from_model(sphere2(), 8);
    auto cert = *detect_pd(a, cohomology(a)).certificate;
    DegreewiseIdeal pos = zero_ideal(a);
    for (int k = 1; k <= a.top(); ++k) {
      for (std::size_t i = 0; i < a.dim(k); ++i) pos.basis[k].push_back(SparseVector::unit(i));
    }
    CHECK_THROWS_AS(choose_omega_complement(a, cert, &pos), PreconditionError);
  }
}

TEST_CASE("duality morphisms", "[poincare]") {
  SECTION("R = Q: phi(1) is the identity functional") {
    auto r = shared(rationals());
    auto check = detect_pd(*r, cohomology(*r));
    REQUIRE(check.pd);
    CHECK(check.certificate->n == 0);
    auto choice = choose_omega_complement(*r, *check.certificate);
    auto dm = build_duality_morphisms(r, choice);
    CHECK(dm.phi_hat.block(0, 1, 1) == SparseMatrix::identity(1));
    CHECK(dm.ok());
  }
  SECTION("S^2: H(phi) is an iso in degrees 0..2") {
    auto r = shared(Cdga::from_model(sphere2(), 6));
    auto choice = choose_omega_complement(*r, *detect_pd(*r, cohomology(*r)).certificate);
    auto dm = build_duality_morphisms(r, choice);
    CHECK(dm.quasi_iso.iso);
    CHECK(dm.ok());
  }
  SECTION("Lambda(x_3): phi(x)(1) = 1") {
    auto r = shared(Cdga::from_model(sphere3(), 8));
    auto choice = choose_omega_complement(*r, *detect_pd(*r, cohomology(*r)).certificate);
    auto dm = build_duality_morphisms(r, choice);
    CHECK(dm.phi.degree() == -3);
    CHECK(dm.phi.block(3, 1, 1) == SparseMatrix::identity(1));
    CHECK(dm.ok());
  }
  SECTION("every catalog model") {
    for (const auto& entry : catalog()) {
      auto r = shared(Cdga::from_model(entry.model, entry.formal_dimension + 2 * entry.model.max_generator_degree()));
      auto check = detect_pd(*r, cohomology(*r));
      REQUIRE(check.pd);
      auto choice = choose_omega_complement(*r, *check.certificate);
      auto dm = build_duality_morphisms(r, choice);
      INFO(entry.name);
      CHECK(dm.omega_normalized);
      CHECK(dm.omega_kills_boundaries);
      CHECK_FALSE(dm.chain_defect);
      CHECK_FALSE(dm.module_defect);
      CHECK(dm.quasi_iso.iso);
      // H(phi) in degree p against the pairing of the certificate: both nonsingular
      for (int p = 0; p <= check.certificate->n; ++p) {
        CHECK(rank_kernel_image(check.certificate->pairings[p]).rank == cohomology(*r).betti(p));
      }
    }
  }
  SECTION("phi kills K = (ker mu)^{n+1} and factors through the quotient") {
    auto ts = tensor_square(sphere2(), 8);
    auto r = shared(ts.square_algebra);
    auto ideal = ideal_power_basis(ts, 3);
    auto q = quotient_by_ideal(*r, ideal);
    auto p2 = projection_morphism(*r, q);
    auto choice = choose_omega_complement(*r, *detect_pd(*r, cohomology(*r)).certificate, &ideal);
    auto dm = build_duality_morphisms(r, choice, &ideal, &p2);
    CHECK(dm.kernel_killed == true);
    CHECK(dm.factorization == true);
    CHECK(dm.ok());
  }
}

TEST_CASE("phi is a module map over every basis pair", "[poincare][property]") {
  auto r = shared(Cdga::from_model(cp2().model, 9));
  auto choice = choose_omega_complement(*r, *detect_pd(*r, cohomology(*r)).certificate);
  auto dm = build_duality_morphisms(r, choice);
  const int n = choice.n;
  // a . phi_hat(b) = phi_hat(a b) for all basis elements a, b with |a| + |b| <= n
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      for (std::size_t x = 0; x < r->dim(i); ++x) {
        for (std::size_t y = 0; y < r->dim(j); ++y) {
          Element a{i, SparseVector::unit(x)};
          SparseVector lhs = dm.suspended_dual.act(a, j, dm.phi_hat.apply(j, SparseVector::unit(y)));
          SparseVector rhs = dm.phi_hat.apply(i + j, r->product(i, x, j, y));
          CHECK(lhs == rhs);
        }
      }
    }
  }
}
