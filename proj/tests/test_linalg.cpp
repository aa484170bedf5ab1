#include <doctest.h>
#include <gapcert/linalg.hpp>

#include "test_util.hpp"

using namespace gapcert;
using namespace gapcert::testutil;

static Mat random_hermitian(int n, Rng& rng) {
  Mat b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = rng.cgaussian();
  return b + b.adjoint();
}

TEST_CASE("eigensystem residuals and orthonormality") {
  Rng rng(7);
  for (int n : {2, 5, 16, 64}) {
    Mat a = random_hermitian(n, rng);
    EigenSystem es = eigensystem(a);
    CHECK((es.vectors.adjoint() * es.vectors - Mat::Identity(n, n))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    for (int i = 0; i < n; ++i)
      CHECK((a * es.vectors.col(i) - es.values(i) * es.vectors.col(i)).norm() <
            1e-10 * std::max(1.0, std::abs(es.values(i))));
    for (int i = 0; i + 1 < n; ++i) CHECK(es.values(i) <= es.values(i + 1));
  }
  CHECK_THROWS_AS(eigensystem(Mat::Random(4, 4) * 10.0), NumericsError);
}

TEST_CASE("operator norm: power iteration matches the dense route") {
  Rng rng(11);
  for (int n : {8, 64, 128, 256, 512}) {
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.cgaussian();
    const double dense = op_norm(a);
    const double iter = op_norm_apply(
        [&](const Vec& v) { return Vec(a * v); },
        [&](const Vec& v) { return Vec(a.adjoint() * v); }, n, 1e-12, 3);
    CHECK(std::abs(dense - iter) <= 1e-9 * std::max(1.0, dense));
  }
  CHECK(op_norm(Mat::Zero(5, 5)) == 0.0);
}

TEST_CASE("top singular pair attains the norm") {
  Rng rng(13);
  Mat a(32, 32);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) a(i, j) = rng.cgaussian();
  auto [sigma, v] = top_singular_pair(a);
  CHECK(std::abs((a * v).norm() - sigma) < 1e-9);
  CHECK(std::abs(v.norm() - 1.0) < 1e-12);
}

TEST_CASE("lanczos finds the top eigenpairs of a Hermitian operator") {
  Rng rng(17);
  const int n = 300;
  Mat a = random_hermitian(n, rng);
  EigenSystem es = eigensystem(a);
  LanczosResult lr = lanczos_largest(
      [&](const Vec& v) { return Vec(a * v); }, n, 3, 1e-12, 5, 600);
  REQUIRE(lr.values.size() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK(lr.values[i] == doctest::Approx(es.values(n - 1 - i)).epsilon(1e-9));
  // degenerate top: a projector has eigenvalue 1 with multiplicity rank
  Mat p = random_projector(64, 5, rng);
  LanczosResult lp = lanczos_largest(
      [&](const Vec& v) { return Vec(p * v); }, 64, 6, 1e-12, 7, 600);
  REQUIRE(lp.values.size() == 6);
  for (int i = 0; i < 5; ++i) CHECK(lp.values[i] == doctest::Approx(1.0));
  CHECK(lp.values[5] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("kron dimensions and values") {
  Mat a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  Mat k = kron(a, b);
  CHECK(k.rows() == 4);
  CHECK(std::abs(k(0, 1) - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(k(2, 1) - cplx(3, 0)) < 1e-15);
}

TEST_CASE("rng is deterministic and gaussian-ish") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.gaussian() == b.gaussian());
  Rng c(43);
  double mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) mean += c.gaussian();
  mean /= n;
  CHECK(std::abs(mean) < 0.05);
}
