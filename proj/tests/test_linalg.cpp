#include <catch2/catch_amalgamated.hpp>
#include "heckelab/linalg.hpp"
#include <random>

using namespace heckelab;
using namespace heckelab::linalg;
using cd = std::complex<double>;

TEST_CASE("lu solve reproduces random right-hand sides") {
  std::mt19937_64 rng(20260815);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + int(rng() % 7);
    Matrix<cd> a(n, n);
    std::vector<cd> x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      x[size_t(i)] = cd(dist(rng), dist(rng));
      for (int j = 0; j < n; ++j) a(i, j) = cd(dist(rng), dist(rng));
    }
    auto b = matvec(a, x);
    auto got = solve(a, b);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(got[size_t(i)] - x[size_t(i)]) < 1e-10);
  }
}

TEST_CASE("inverse times the matrix is the identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  int n = 6;
  Matrix<double> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
  auto prod = matmul(inverse(a), a);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      CHECK(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("singular matrices are rejected") {
  Matrix<double> a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 2;
  a(1, 1) = 4;
  CHECK_THROWS_AS(solve(a, std::vector<double>{1.0, 1.0}),
                  std::runtime_error);
}

TEST_CASE("reduced row echelon finds rank and pivots") {
  // rows: [1 2 3], [2 4 6], [0 0 1] -> rank 2, pivots {0, 2}
  Matrix<double> m(3, 3);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(0, 2) = 3;
  m(1, 0) = 2;
  m(1, 1) = 4;
  m(1, 2) = 6;
  m(2, 2) = 1;
  auto res = reduced_row_echelon(m, 1e-12);
  CHECK(res.rank == 2);
  REQUIRE(res.pivot_cols.size() == 2);
  CHECK(res.pivot_cols[0] == 0);
  CHECK(res.pivot_cols[1] == 2);
  // reduced form: row 0 = [1 2 0], row 1 = [0 0 1]
  CHECK(std::abs(m(0, 0) - 1) < 1e-14);
  CHECK(std::abs(m(0, 1) - 2) < 1e-14);
  CHECK(std::abs(m(0, 2)) < 1e-14);
  CHECK(std::abs(m(1, 2) - 1) < 1e-14);
}

TEST_CASE("echelon tolerance is column-relative") {
  // second column is a huge multiple of the first: after elimination its
  // residual is far below the column scale and must not become a pivot
  Matrix<double> m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 1e12;
  m(1, 0) = 3;
  m(1, 1) = 3e12 * (1 + 1e-14);
  auto res = reduced_row_echelon(m, 1e-10);
  CHECK(res.rank == 1);
}

TEST_CASE("multiprecision entries work") {
  Matrix<real_mp> a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 3;
  auto x = solve(a, std::vector<real_mp>{real_mp(5), real_mp(10)});
  CHECK(to_double(abs(x[0] - 1)) < 1e-45);
  CHECK(to_double(abs(x[1] - 3)) < 1e-45);
}
