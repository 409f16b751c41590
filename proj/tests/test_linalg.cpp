#include <catch_amalgamated.hpp>

#include <random>

#include "sectcat/linalg.hpp"

using namespace sectcat;

namespace {

SparseMatrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<int> entry(-3, 3);
  std::uniform_int_distribution<int> den(1, 4);
  std::bernoulli_distribution present(0.4);
  SparseMatrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) {
      if (present(rng)) m.column(j).add_to(i, Scalar(entry(rng)) / den(rng));
    }
  }
  return m;
}

SparseVector random_vector(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> entry(-5, 5);
  SparseVector v;
  for (std::size_t i = 0; i < n; ++i) v.add_to(i, Scalar(entry(rng)));
  return v;
}

}  // namespace

TEST_CASE("rank_kernel_image on the documented examples", "[linalg]") {
  SECTION("identity") {
    auto r = rank_kernel_image(SparseMatrix::identity(2));
    CHECK(r.rank == 2);
    CHECK(r.kernel.empty());
  }
  SECTION("zero 3x2") {
    auto r = rank_kernel_image(SparseMatrix(3, 2));
    CHECK(r.rank == 0);
    CHECK(r.kernel.size() == 2);
  }
  SECTION("[[1,2],[2,4]] has kernel spanned by (2,-1)") {
    auto m = SparseMatrix::from_dense({{1, 2}, {2, 4}});
    auto r = rank_kernel_image(m);
    CHECK(r.rank == 1);
    REQUIRE(r.kernel.size() == 1);
    // (2,-1) and the returned vector are proportional
    auto k = r.kernel.front().to_dense(2);
    CHECK(k[0] * Scalar(-1) == k[1] * Scalar(2));
    CHECK(m.apply(r.kernel.front()).is_zero());
    CHECK(r.pivot_columns == std::vector<std::size_t>{0});
  }
  SECTION("empty matrix") {
    auto r = rank_kernel_image(SparseMatrix(0, 0));
    CHECK(r.rank == 0);
    CHECK(r.kernel.empty());
  }
}

TEST_CASE("solve_linear on the documented examples", "[linalg]") {
  SECTION("identity returns b") {
    SparseVector b{{0, Scalar(3, 2)}, {2, Scalar(-7)}};
    auto x = solve_linear(SparseMatrix::identity(3), b);
    REQUIRE(x);
    CHECK(*x == b);
  }
  SECTION("x1 + x2 = 2") {
    auto m = SparseMatrix::from_dense({{1, 1}});
    auto x = solve_linear(m, SparseVector{{0, Scalar(2)}});
    REQUIRE(x);
    CHECK(m.apply(*x) == SparseVector{{0, Scalar(2)}});
    CHECK(*x == SparseVector{{0, Scalar(2)}});
  }
  SECTION("zero matrix with nonzero b is inconsistent") {
    CHECK_FALSE(solve_linear(SparseMatrix(2, 2), SparseVector{{1, Scalar(1)}}));
  }
  SECTION("dimension mismatch") {
    CHECK_THROWS_AS(solve_linear(SparseMatrix(2, 2), SparseVector{{5, Scalar(1)}}), InputError);
  }
}

TEST_CASE("extend_to_complement on the documented examples", "[linalg]") {
  SECTION("U = W") {
    CHECK(extend_to_complement({SparseVector::unit(0), SparseVector::unit(1)}, 2).empty());
  }
  SECTION("U empty") {
    auto c = extend_to_complement({}, 2);
    CHECK(c == std::vector<SparseVector>{SparseVector::unit(0), SparseVector::unit(1)});
  }
  SECTION("U = span(1,1) gets complement (1,0)") {
    auto c = extend_to_complement({SparseVector{{0, Scalar(1)}, {1, Scalar(1)}}}, 2);
    CHECK(c == std::vector<SparseVector>{SparseVector::unit(0)});
  }
  SECTION("dependent U is rejected") {
    SparseVector v{{0, Scalar(1)}};
    CHECK_THROWS_AS(extend_to_complement({v, 2 * v}, 2), InputError);
  }
  SECTION("complement inside a subspace W") {
    SparseVector a{{0, Scalar(1)}, {1, Scalar(1)}};
    SparseVector b{{2, Scalar(1)}};
    auto c = extend_to_complement({a}, 3, {SparseVector::unit(0) + SparseVector::unit(1), b});
    CHECK(c == std::vector<SparseVector>{b});
    CHECK_THROWS_AS(extend_to_complement({SparseVector::unit(0)}, 3, {b}), InputError);
  }
}

TEST_CASE("rank-nullity and solve round trip on random matrices", "[linalg][property]") {
  std::mt19937 rng(20261018);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t rows = rng() % 7, cols = rng() % 7;
    auto m = random_matrix(rng, rows, cols);
    auto r = rank_kernel_image(m);
    CHECK(r.rank + r.kernel.size() == cols);
    for (const auto& k : r.kernel) CHECK(m.apply(k).is_zero());
    // transpose has the same rank
    CHECK(rank_kernel_image(m.transpose()).rank == r.rank);

    auto x = random_vector(rng, cols);
    auto b = m.apply(x);
    auto sol = solve_linear(m, b);
    REQUIRE(sol);
    CHECK(m.apply(*sol) == b);
  }
}

TEST_CASE("complement extension spans and stays independent", "[linalg][property]") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t dim = 1 + rng() % 6;
    auto m = random_matrix(rng, dim, rng() % 5);
    auto u = rank_kernel_image(m).image;
    auto c = extend_to_complement(u, dim);
    Reducer all(dim);
    for (const auto& v : u) CHECK(all.insert(v));
    for (const auto& v : c) CHECK(all.insert(v));
    CHECK(all.rank() == dim);
  }
}

TEST_CASE("tracked reducer recovers coordinates", "[linalg]") {
  Reducer red(3, true);
  SparseVector a{{0, Scalar(1)}, {1, Scalar(2)}};
  SparseVector b{{1, Scalar(1)}, {2, Scalar(-1)}};
  CHECK(red.insert(a));
  CHECK(red.insert(b));
  SparseVector rel;
  CHECK_FALSE(red.insert(a + 3 * b, &rel));
  CHECK(rel == SparseVector{{0, Scalar(-1)}, {1, Scalar(-3)}, {2, Scalar(1)}});
  auto c = red.coordinates(2 * a - b);
  REQUIRE(c);
  CHECK(*c == SparseVector{{0, Scalar(2)}, {1, Scalar(-1)}});
  CHECK_FALSE(red.coordinates(SparseVector::unit(2) + SparseVector::unit(0)));
}
