#include <doctest.h>

#include "levyou/errors.hpp"
#include "levyou/linalg.hpp"

#include <cmath>

using namespace levyou;

TEST_CASE("expm of a rotation generator") {
  Matrix m(2, 2);
  m << 0, 1, -1, 0;
  const Matrix e = expm(m);
  CHECK(e(0, 0) == doctest::Approx(std::cos(1.0)).epsilon(1e-14));
  CHECK(e(0, 1) == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
  CHECK(e(1, 0) == doctest::Approx(-std::sin(1.0)).epsilon(1e-14));
}

TEST_CASE("expm of zero is the identity exactly") {
  const Matrix e = expm(Matrix::Zero(3, 3));
  CHECK(e == Matrix::Identity(3, 3));
}

TEST_CASE("expm handles large norms by squaring") {
  Matrix m = Matrix::Zero(1, 1);
  m(0, 0) = 30.0;
  CHECK(expm(m)(0, 0) == doctest::Approx(std::exp(30.0)).epsilon(1e-13));
  Matrix n(2, 2);
  n << 1, 1, 0, 1;  // e^{N} = e [[1,1],[0,1]]
  const Matrix en = expm(5.0 * n);
  CHECK(en(0, 1) == doctest::Approx(5.0 * std::exp(5.0)).epsilon(1e-13));
}

TEST_CASE("expm rejects non-square input") {
  CHECK_THROWS_AS(expm(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("integrated propagator") {
  Matrix a = Matrix::Constant(1, 1, 0.7);
  CHECK(integrated_propagator(a, 2.0)(0, 0) ==
        doctest::Approx(std::expm1(1.4) / 0.7).epsilon(1e-13));
  CHECK(integrated_propagator(Matrix::Zero(2, 2), 3.0).isApprox(3.0 * Matrix::Identity(2, 2)));
  Matrix n(2, 2);
  n << 0, 1, 0, 0;  // ∫ e^{sN} ds = [[t, t²/2],[0, t]]
  const Matrix g = integrated_propagator(n, 2.0);
  CHECK(g(0, 1) == doctest::Approx(2.0));
  CHECK(g(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("numerical rank and margin") {
  Matrix m(3, 3);
  m << 1, 0, 0, 0, 1e-3, 0, 0, 0, 0;
  const RankInfo r = rank_info(m);
  CHECK(r.rank == 2);
  CHECK(r.margin == doctest::Approx(1e-3));
  CHECK(numerical_rank(Matrix::Zero(0, 3)) == 0);
  CHECK(numerical_rank(Matrix::Zero(2, 2)) == 0);
  m(2, 2) = 1e-14;  // below the default cutoff 3e-10
  CHECK(numerical_rank(m) == 2);
}

TEST_CASE("subspaces") {
  Vector a(3), b(3), c(3);
  a << 1, 0, 0;
  b << 1, 1, 0;
  c << 0, 2, 0;
  const Subspace s = span_of({a, b, c}, 3);
  CHECK(s.dim() == 2);
  CHECK_FALSE(s.is_full());
  const Subspace t = span_of({c}, 3);
  CHECK(join(s, t).same_as(s));
  Vector e3 = Vector::Unit(3, 2);
  CHECK(join(s, span_of({e3}, 3)).is_full());
  CHECK(Subspace(3).dim() == 0);
  const Matrix p = s.projector();
  CHECK((p * p - p).norm() < 1e-14);
}

TEST_CASE("op_norm") {
  Matrix m(2, 2);
  m << 3, 0, 4, 0;
  CHECK(op_norm(m) == doctest::Approx(5.0));
}
