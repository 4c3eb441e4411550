#include <doctest.h>

#include "fixtures.hpp"
#include "levyou/errors.hpp"

#include <cmath>
#include <random>

using namespace levyou;
using namespace fixtures;

TEST_CASE("load the first Kolmogorov system") {
  const Json cfg = Json::parse(R"({
    "model": {"m": 2, "d": 1, "A": [[1, 0], [1, 0]], "D": [[1], [0]]},
    "measure": {"components": [{"kind": "factorial_radial", "weight": "constant"}]}
  })");
  const OUModel m = load_model(cfg);
  CHECK(m.m == 2);
  CHECK(m.k == 0);
  CHECK(m.B.rows() == 2);
  CHECK(m.B.cols() == 0);
  CHECK_FALSE(m.has_gaussian());
  CHECK(m.x0.isZero());
  CHECK(m.measure.infinite_mass());
}

TEST_CASE("shape errors name the offending block") {
  const Json cfg = Json::parse(R"({
    "model": {"m": 2, "d": 1, "A": [[1, 0, 0], [1, 0, 0]], "D": [[1], [0]]}
  })");
  try {
    load_model(cfg);
    FAIL("expected a dimension error");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("model.A") != std::string::npos);
    CHECK(e.exit_code() == 2);
  }
  const Json bad_atom = Json::parse(R"({
    "model": {"m": 1, "d": 1, "A": 1, "D": 1},
    "measure": {"components": [{"kind": "atoms", "points": [[1, 2]], "weights": [1]}]}
  })");
  CHECK_THROWS_AS(load_model(bad_atom), DimensionError);
  const Json unknown = Json::parse(R"({
    "model": {"m": 1, "d": 1, "A": 1, "D": 1},
    "measure": {"components": [{"kind": "spiral"}]}
  })");
  CHECK_THROWS_AS(load_model(unknown), ConfigError);
}

TEST_CASE("model documents round-trip") {
  const Json cfg = Json::parse(R"({
    "model": {"m": 2, "k": 1, "d": 2, "A": [[0, 1], [-1, 0]], "B": [[1], [0]],
              "D": [[1, 0], [0, 1]], "a": [0.5, 0], "x0": [1, 2]},
    "measure": {"n_max": 25, "components": [
      {"kind": "atoms", "points": [[0.5, 0.1]], "weights": [2]},
      {"kind": "factorial_curve"},
      {"kind": "factorial_radial", "direction": [0.6, 0.8], "weight": {"rule": "linear", "c": 2}},
      {"kind": "power_law", "c": 1, "alpha": 1.2, "r_max": "inf"},
      {"kind": "power_law", "c": 1, "alpha": 0.7, "r_max": 3,
       "directions": {"vectors": [[1, 0], [0, 1]], "weights": [0.25, 0.75]}},
      {"kind": "tabulated", "knots": [0.5, 1, 2], "values": [4, 1, 0.5]}
    ]}
  })");
  const OUModel m = load_model(cfg);
  const Json once = model_to_json(m);
  const Json twice = model_to_json(load_model(once));
  CHECK(once == twice);
  CHECK(m.measure.n_max() == 25);
}

TEST_CASE("gaussian covariance closed forms") {
  CHECK(gaussian_covariance(gaussian_model(), 1.0)(0, 0) ==
        doctest::Approx((std::exp(2.0) - 1.0) / 2.0).epsilon(1e-13));
  CHECK(gaussian_covariance(gaussian_model(0.0), 2.0)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gaussian_covariance(gaussian_model(), 0.0).isZero());
  CHECK_THROWS_AS(gaussian_covariance(gaussian_model(), -1.0), DomainError);
}

TEST_CASE("gaussian covariance is symmetric PSD and splits along the semigroup") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix A(3, 3), B(3, 2);
    for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = 0.7 * n(gen);
    for (int i = 0; i < 6; ++i) B(i / 2, i % 2) = n(gen);
    const OUModel model = make_model(A, B, Matrix::Zero(3, 1), LevyMeasure(1));
    const double t = 1.5;
    const Matrix s = gaussian_covariance(model, t);
    CHECK((s - s.transpose()).norm() <= 1e-12 * s.norm());
    const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().minCoeff();
    CHECK(min_eig >= -1e-10 * s.norm());
    const double cut = u(gen) * t;
    const Matrix e = expm(cut * A);
    const Matrix split = e * gaussian_covariance(model, t - cut) * e.transpose() +
                         gaussian_covariance(model, cut);
    CHECK((split - s).norm() <= 1e-9 * s.norm());
  }
}

TEST_CASE("deterministic part") {
  OUModel m = make_model(mat({{1.0}}), Matrix(), mat({{1.0}}), LevyMeasure(1),
                         Vector::Constant(1, 2.0), Vector::Constant(1, 3.0));
  // e^t·3 + 2(e^t − 1)
  CHECK(deterministic_part(m, 1.0)(0) == doctest::Approx(5.0 * std::exp(1.0) - 2.0));
}
