#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sectcat/invariants.hpp"
#include "test_models.hpp"

using namespace sectcat;
using namespace sectcat::testing;

namespace {

/// Cap from the sufficiency rule: 2N + max generator degree + 1.
int sufficient_cap(const CatalogModel& c) { return 2 * c.formal_dimension + c.model.max_generator_degree() + 1; }

const oracle::Space& space_named(const std::vector<oracle::Space>& spaces, const std::string& name) {
  for (const auto& s : spaces) {
    if (s.name == name) return s;
  }
  throw std::logic_error("no oracle space " + name);
}

}  // namespace

TEST_CASE("oracle self-checks", "[invariants][oracle]") {
  // the oracle algebras are associative and graded commutative
  for (const auto& s : oracle::catalog_spaces()) {
    const auto& h = s.cohomology;
    auto sq = oracle::tensor(h, h);
    const std::size_t n = sq.dim();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        auto ij = sq.mul(oracle::unit_vec(n, i), oracle::unit_vec(n, j));
        auto ji = sq.mul(oracle::unit_vec(n, j), oracle::unit_vec(n, i));
        const int sign = (sq.degree[i] * sq.degree[j]) % 2 == 0 ? 1 : -1;
        for (std::size_t k = 0; k < n; ++k) CHECK(ij[k] == sign * ji[k]);
        for (std::size_t l = 0; l < n; l += 3) {
          auto left = sq.mul(ij, oracle::unit_vec(n, l));
          auto right = sq.mul(oracle::unit_vec(n, i), sq.mul(oracle::unit_vec(n, j), oracle::unit_vec(n, l)));
          CHECK(left == right);
        }
      }
    }
  }
  const auto spaces = oracle::catalog_spaces();
  CHECK(oracle::nil_ker_mu(space_named(spaces, "S2").cohomology) == 2);
  CHECK(oracle::nil_ker_mu(space_named(spaces, "S3").cohomology) == 1);
  CHECK(oracle::nil_ker_mu(space_named(spaces, "CP2").cohomology) == 4);
  CHECK(oracle::cup_length(space_named(spaces, "CP2").cohomology) == 2);
}

TEST_CASE("nil ker agrees with the oracle", "[invariants]") {
  const auto spaces = oracle::catalog_spaces();
  for (const auto& c : catalog()) {
    DYNAMIC_SECTION(c.name) {
      InvariantEngine e(c.model, sufficient_cap(c));
      auto r = nil_ker_report(e);
      REQUIRE(r.value);
      CHECK(*r.value == oracle::nil_ker_mu(space_named(spaces, c.name).cohomology));
      CHECK(r.complete);
      CHECK(r.status == "determined");
      CHECK_FALSE(r.witnesses.empty());
    }
  }
}

TEST_CASE("nil ker of an explicit algebra", "[invariants]") {
  // H(S^2) (x) H(S^2) given directly: (x - x')^2 = -2 x x' is the witness
  auto h = Cdga::from_model(sphere2(), 9);
  auto ts = tensor_square(sphere2(), 8);
  auto hs = cohomology(ts.square_algebra, 8);
  auto hmu = induced_map(ts.mu.matrices(), hs, cohomology(h, 8), 0, 8);
  auto nk = nil_ker(ts.square_algebra, hs, hmu);
  CHECK(nk.value == 2);
  REQUIRE(nk.witness_degree);
  CHECK(*nk.witness_degree == 4);
  // ker H(mu) = span{x - x', x x'}; its square is spanned by x x'
  CHECK(nk.power_dims == std::vector<std::size_t>{2, 1});
}

TEST_CASE("Toomer invariant", "[invariants]") {
  const auto spaces = oracle::catalog_spaces();
  for (const auto& c : catalog()) {
    DYNAMIC_SECTION(c.name) {
      InvariantEngine e(c.model, sufficient_cap(c));
      auto r = toomer_e0(e);
      REQUIRE(r.value);
      // the catalog spaces are formal, so e0 is the cup length
      CHECK(*r.value == oracle::cup_length(space_named(spaces, c.name).cohomology));
      CHECK(r.complete);
    }
  }
  SECTION("explicit values") {
    CHECK(toomer_e0(*std::make_unique<InvariantEngine>(sphere2(), 8)).value == 1);
    CHECK(toomer_e0(*std::make_unique<InvariantEngine>(sphere3(), 8)).value == 1);
    CHECK(toomer_e0(*std::make_unique<InvariantEngine>(cp2().model, 10)).value == 2);
  }
  SECTION("n below e0 carries a witness") {
    InvariantEngine e(cp2().model, 10);
    auto r = toomer_e0(e);
    REQUIRE(r.witnesses.size() == 1);
    CHECK(r.witnesses[0].find("x^2") != std::string::npos);
  }
}

TEST_CASE("htc sweep", "[invariants]") {
  SECTION("spheres and CP2") {
    InvariantEngine s3(sphere3(), 10);
    CHECK(htc(s3).value == 1);
    InvariantEngine s2(sphere2(), 8);
    CHECK(htc(s2).value == 2);
    InvariantEngine cp(cp2().model, 14);
    auto r = htc(cp);
    CHECK(r.value == 4);
    CHECK(r.complete);
  }
  SECTION("monotone and bracketed by nil ker and 2 e0") {
    for (const auto& c : catalog()) {
      InvariantEngine e(c.model, sufficient_cap(c));
      auto sweep = htc_sweep(e, e.default_budget());
      bool seen = false;
      for (const auto& s : sweep) {
        if (seen) CHECK(s.injective);
        seen = seen || s.injective;
      }
      auto audit = inequality_audit(e);
      CHECK_FALSE(audit.violated());
      for (const auto& check : audit.checks) CHECK(check.decided);
    }
  }
  SECTION("budget exhausted gives a lower bound") {
    InvariantEngine e(cp2().model, 14);
    auto r = htc(e, 2);
    CHECK_FALSE(r.value);
    CHECK(r.lower_bound == 3);
    CHECK(r.status == "budget_exhausted");
    CHECK_FALSE(r.complete);
  }
  SECTION("a cap below the rule is flagged incomplete") {
    InvariantEngine e(sphere2(), 6);
    auto r = htc(e);
    CHECK(r.value == 2);
    CHECK_FALSE(r.complete);
  }
}

TEST_CASE("mtc attempts", "[invariants]") {
  InvariantEngine e(sphere2(), 8);
  CHECK(mtc_attempt(e, 0).status == "no_retraction_at_cap");
  CHECK(mtc_attempt(e, 1).status == "no_retraction_at_cap");
  auto ok = mtc_attempt(e, 2);
  REQUIRE(ok.status == "retraction_built");
  CHECK(ok.outcome.verification->passed());
}

TEST_CASE("theorem verification", "[invariants]") {
  SECTION("S2, S3, CP2") {
    for (const auto& c : std::vector<CatalogModel>{{"S2", sphere2(), 2}, {"S3", sphere3(), 3}, cp2()}) {
      DYNAMIC_SECTION(c.name) {
        InvariantEngine e(c.model, sufficient_cap(c));
        auto t = verify_theorem(e);
        CHECK(t.status == "verified");
        REQUIRE(t.mtc_star);
        REQUIRE(t.htc.value);
        CHECK(*t.mtc_star == *t.htc.value);
        for (const auto& a : t.attempts) {
          if (a.n < *t.mtc_star) CHECK(a.status == "no_retraction_at_cap");
        }
      }
    }
  }
  SECTION("refused when H of the square is not Poincare") {
    SullivanModel poly({{"x", 2}}, {});
    InvariantEngine e(poly, 8);
    auto t = verify_theorem(e);
    CHECK(t.status == "refused");
    CHECK_FALSE(t.mtc_star);
  }
}

TEST_CASE("powers of the diagonal class", "[invariants]") {
  // (x - x')^e and c x^a x'^b in the tensor square; compares cohomology classes
  struct Power {
    bool zero_class;
    bool matches;
  };
  auto diagonal_power = [](const SullivanModel& m, int e, const Scalar& c, std::uint32_t a_exp, std::uint32_t b_exp,
                           int cap) {
    auto ts = tensor_square(m, cap);
    const auto& a = ts.square_algebra;
    const std::size_t x = *ts.square.find("x"), xp = *ts.square.find("x'");
    PolyElement z = ts.square.generator_element(x);
    add_term(z, ts.square.generator_monomial(xp), Scalar(-1));
    const int deg = m.generators()[*m.find("x")].degree;
    Element zz{deg, a.to_coords(z)};
    Element p = zz;
    for (int i = 1; i < e; ++i) p = a.multiply(p, zz);
    Monomial target = ts.square.unit();
    target.exponents[x] = a_exp;
    target.exponents[xp] = b_exp;
    SparseVector expected = a.to_coords(PolyElement{{target, c}});
    auto h = cohomology(a, cap);
    SparseVector diff = p.coords;
    diff.axpy(Scalar(-1), expected);
    return Power{h.at(p.degree).is_coboundary(p.coords), h.at(p.degree).is_coboundary(diff)};
  };
  SECTION("CP2: (x - x')^4 ~ 6 x^2 x'^2, nonzero; the fifth power vanishes") {
    auto p4 = diagonal_power(cp2().model, 4, Scalar(6), 2, 2, 12);
    CHECK_FALSE(p4.zero_class);
    CHECK(p4.matches);
    CHECK(diagonal_power(cp2().model, 5, Scalar(0), 0, 0, 12).zero_class);
  }
  SECTION("S2: (x - x')^2 ~ -2 x x'") {
    auto p2 = diagonal_power(sphere2(), 2, Scalar(-2), 1, 1, 8);
    CHECK_FALSE(p2.zero_class);
    CHECK(p2.matches);
    CHECK(diagonal_power(sphere2(), 3, Scalar(0), 0, 0, 8).zero_class);
  }
  SECTION("S3: (x - x')^2 = 0") { CHECK(diagonal_power(sphere3(), 2, Scalar(0), 0, 0, 8).zero_class); }
}
