#include "doctest.h"
#include "fixtures.hpp"
#include "levyou/charfn.hpp"
#include "levyou/errors.hpp"

#include <cmath>
#include <numbers>

using namespace levyou;
using fixtures::mat;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }
Vector v2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}
void check_close(Complex got, Complex want, double rel) {
  const double scale = std::max(1.0, std::abs(want));
  CHECK(std::abs(got - want) <= rel * scale);
}

}  // namespace

TEST_CASE("gaussian exponent matches the covariance closed form") {
  const auto model = fixtures::gaussian_model(1.0, 1.0);
  const ExponentEvaluator ev(model, 1.0);
  const double sigma = (std::exp(2.0) - 1.0) / 2.0;
  CHECK(ev.gaussian_covariance()(0, 0) == doctest::Approx(3.194528049465325).epsilon(1e-12));
  check_close(ev.psi(v1(1.0)), -0.5 * sigma, 1e-12);
  CHECK(std::abs(ev.charfn(v1(1.0))) == doctest::Approx(0.20245).epsilon(1e-4));
  check_close(ev.derivative(v1(0.7), {0}), -sigma * 0.7, 1e-12);
  check_close(ev.derivative(v1(0.7), {0, 0}), -sigma, 1e-12);
  check_close(ev.derivative(v1(0.7), {0, 0, 0}), 0.0, 1e-12);
}

TEST_CASE("single atom without drift") {
  const auto model = fixtures::scalar_jump_model(fixtures::single_atom(0.5, 1.0), 0.0);
  const ExponentEvaluator ev(model, 1.0);
  const Complex want(-1.0, 1.0 - std::numbers::pi / 2.0);
  check_close(ev.psi(v1(std::numbers::pi)), want, 1e-12);
  CHECK(std::abs(ev.charfn(v1(std::numbers::pi))) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  check_close(ev.derivative(v1(0.0), {0, 0}), -0.25, 1e-10);
}

TEST_CASE("scalar atoms against direct quadrature") {
  struct Case {
    double a, t, u, w, z;
    int r;
    Complex want;
  };
  const Case cases[] = {
      {0.7, 1.3, 0.5, 1.0, 3.1, 0, {-2.1370196290974394, -2.6758800831629697}},
      {0.7, 1.3, 0.5, 1.0, -3.1, 0, {-2.1370196290974394, 2.6758800831629697}},
      {0.7, 1.3, 2.0, 0.5, 3.1, 0, {-0.60775131047807744, 0.15162721599392473}},
      {-0.6, 2.0, 0.3, 2.0, 40.0, 0, {-3.9608523981840064, -29.002876113911454}},
      {0.7, 1.3, 0.5, 1.0, 3.1, 1, {-0.35932641061225994, -1.8210323466822725}},
      {0.7, 1.3, 0.5, 1.0, -3.1, 1, {0.35932641061225994, -1.8210323466822725}},
      {0.7, 1.3, 2.0, 0.5, 3.1, 1, {-0.44938707847729637, 0.088372946114176877}},
      {0.7, 1.3, 0.5, 1.0, 3.1, 2, {0.71901463321356848, -0.1938093255242921}},
      {0.7, 1.3, 0.5, 1.0, -3.1, 3, {-0.078157215637850176, 0.70322139887900691}},
      {-0.6, 2.0, 0.3, 2.0, 40.0, 2, {0.0063729142453777459, 0.02796963259848513}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.z);
    CAPTURE(c.r);
    const auto model = fixtures::scalar_jump_model(fixtures::single_atom(c.u, c.w), c.a);
    const ExponentEvaluator ev(model, c.t);
    const Complex got = c.r == 0 ? ev.psi(v1(c.z)) : ev.derivative(v1(c.z), std::vector<int>(c.r, 0));
    check_close(got, c.want, 1e-10);
  }
}

TEST_CASE("closed form and quadrature agree for a two-dimensional model") {
  LevyMeasure pi(1);
  pi.add(ExplicitAtoms({v1(0.5)}, {1.0}));
  const auto model = fixtures::kolmogorov_first(pi);
  check_close(psi(model, 1.0, v2(1.3, -0.7)), {-0.35862505299137676, -0.11245800578185005}, 1e-10);
}

TEST_CASE("stable and truncated power-law components") {
  const auto stable = fixtures::scalar_jump_model(fixtures::isotropic_stable(1, 1.5), -0.4);
  check_close(psi(stable, 1.0, v1(2.3)), -4.3832583568964742, 1e-9);

  LevyMeasure bounded(1);
  bounded.add(RadialDensity::power_law(1, 1.0, 0.8, 1.0, {}));
  const auto model = fixtures::scalar_jump_model(bounded, 0.5);
  check_close(psi(model, 1.0, v1(7.0)), -9.0609828511123551, 1e-9);
}

TEST_CASE("factorial measure exponent at large frequencies") {
  // Reference values use the exponential integral E1 instead of quadrature.
  const auto model = fixtures::scalar_jump_model(fixtures::linear_factorial_measure(), 1.0);
  const ExponentEvaluator ev(model, 1.0);
  check_close(ev.psi(v1(10.0)), {-8.5153187874671034, -42.716705579190542}, 1e-10);
  check_close(ev.psi(v1(1e3)), {-25.391245330785824, -4664.9206509980296}, 1e-10);
  const Complex big = ev.psi(v1(1e6));
  CHECK(big.real() == doctest::Approx(-46.965867933892856).epsilon(1e-8));
  CHECK(big.imag() == doctest::Approx(-4670771.8038063696).epsilon(1e-10));
  CHECK(std::abs(ev.charfn(v1(2.0 * std::numbers::pi * 120.0))) ==
        doctest::Approx(1.5652146945563527e-10).epsilon(1e-7));
}

TEST_CASE("derivatives agree with finite differences") {
  LevyMeasure pi(2);
  pi.add(ExplicitAtoms({v2(0.4, -0.2), v2(1.5, 0.3)}, {1.0, 0.7}));
  pi.add(RadialDensity::power_law(2, 0.5, 1.2, 2.0, {}));
  const auto model = make_model(mat({{-0.3, 0.5}, {-0.2, 0.1}}), mat({{0.4}, {0.1}}),
                                mat({{1.0, 0.0}, {0.2, 0.8}}), pi);
  const ExponentEvaluator ev(model, 0.8);
  const Vector z = v2(1.1, -0.6);
  const double h = 1e-4;
  for (int j = 0; j < 2; ++j) {
    const Vector e = Vector::Unit(2, j);
    const Complex fd = (ev.psi(z + h * e) - ev.psi(z - h * e)) / (2.0 * h);
    check_close(ev.gradient(z)(j), fd, 1e-6);
    for (int k = 0; k < 2; ++k) {
      const Complex fd2 = (ev.derivative(z + h * e, {k}) - ev.derivative(z - h * e, {k})) / (2.0 * h);
      check_close(ev.derivative(z, {k, j}), fd2, 1e-6);
    }
  }
  check_close(ev.derivative(z, {0, 1}), ev.derivative(z, {1, 0}), 1e-12);
}

TEST_CASE("derivative bounds dominate the derivatives") {
  LevyMeasure pi(1);
  pi.add(ExplicitAtoms({v1(0.3), v1(-2.0)}, {2.0, 0.5}));
  const auto model = make_model(mat({{0.6}}), mat({{0.5}}), mat({{1.0}}), pi);
  const ExponentEvaluator ev(model, 1.0);
  for (int r = 1; r <= 4; ++r) {
    const auto b = derivative_bound(model, 1.0, r);
    CHECK_FALSE(b.infinite);
    for (double z : {0.0, 0.3, 2.0, -15.0, 400.0}) {
      CAPTURE(r);
      CAPTURE(z);
      CHECK(std::abs(ev.derivative(v1(z), std::vector<int>(r, 0))) <= b.bound_at(std::abs(z)) * (1 + 1e-12));
    }
  }
  const auto cauchy = fixtures::scalar_jump_model(fixtures::isotropic_stable(1, 1.0), 0.0);
  CHECK(derivative_bound(cauchy, 1.0, 1).infinite);
  CHECK_FALSE(derivative_bound(fixtures::gaussian_model(), 1.0, 3).infinite);
}

TEST_CASE("scalar decay constants") {
  const auto k = theorem1_constants(1.0, 1.0);
  CHECK(k.beta == doctest::Approx(0.36787944117144232).epsilon(1e-14));
  CHECK(k.C1 == doctest::Approx(1.4685171781787593).epsilon(1e-13));
  CHECK(k.gamma == doctest::Approx(0.98343394271440551).epsilon(1e-13));
  CHECK(k.C2 == doctest::Approx(0.028465155203048584).epsilon(1e-11));
  CHECK(k.C3 == doctest::Approx(0.028465155203048584).epsilon(1e-11));
  CHECK(sinc_sup_beyond(4.0) == doctest::Approx(0.21723362821122166).epsilon(1e-14));
  CHECK(sinc_sup_beyond(10.0) == doctest::Approx(0.091325202823057672).epsilon(1e-10));
  CHECK_THROWS_AS(theorem1_constants(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(theorem1_constants(-1.0, 1.0), DomainError);
}

TEST_CASE("scalar decay bound dominates the factorial measure") {
  for (auto pi : {fixtures::linear_factorial_measure(), fixtures::unit_factorial_measure()}) {
    const auto model = fixtures::scalar_jump_model(pi, 1.0);
    const ExponentEvaluator ev(model, 1.0);
    for (double z : {1.0, 10.0, 123.0, 1e3, 5e4, 1e6, -7e5}) {
      CAPTURE(z);
      CHECK(std::abs(ev.charfn(v1(z))) <= theorem1_bound(model, 1.0, z) * (1 + 1e-9));
    }
  }
  const auto model = fixtures::scalar_jump_model(fixtures::linear_factorial_measure(), 1.0);
  CHECK_THROWS_AS(theorem1_bound(model, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(theorem1_bound(fixtures::gaussian_model(), 1.0, 3.0), DomainError);
}

TEST_CASE("phi function and its growth diagnostic") {
  const auto stable = fixtures::isotropic_stable(1, 1.0);
  // Cauchy: ∫_{|u|≤1/r} u² Π(du) = 1/r, so Φ(r) = r.
  CHECK(phi_big(stable, 50.0) == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(phi_growth_diagnostic(stable).cls == LimitClass::diverges);
  CHECK(phi_growth_diagnostic(fixtures::unit_factorial_measure()).cls != LimitClass::diverges);
  CHECK_THROWS_AS(phi_big(stable, 0.0), DomainError);
}

TEST_CASE("occupation estimate and the multivariate bound") {
  const auto model = fixtures::kolmogorov_first(fixtures::isotropic_stable(1, 1.0));
  const auto est = lemma1_gamma(model, 1.0, 0.1, 0.1);
  CHECK(est.gamma > 0.0);
  CHECK(est.gamma <= 1.0);
  // Degenerate directions give no occupation.
  const auto stuck = make_model(mat({{0, 0}, {0, 0}}), Matrix(), mat({{1}, {0}}),
                                fixtures::isotropic_stable(1, 1.0));
  CHECK(lemma1_gamma(stuck, 1.0, 0.1, 0.1).gamma == doctest::Approx(0.0));

  const ExponentEvaluator ev(model, 1.0);
  for (double r : {5.0, 30.0, 200.0}) {
    for (double ang : {0.3, 1.9, 4.0}) {
      const Vector z = r * v2(std::cos(ang), std::sin(ang));
      CHECK(std::abs(ev.charfn(z)) <= theorem2_bound(model, z, est) * (1 + 1e-9));
    }
  }
  CHECK(theorem2_bound(model, v2(0, 0), est) == 1.0);
}

TEST_CASE("decay scan") {
  const auto gauss = fixtures::gaussian_model();
  const auto scan = phi_decay_scan(gauss, 1.0, 3, {1.0, 2.0, 4.0, 8.0, 16.0});
  REQUIRE(scan.table.size() == 4);
  for (bool ok : scan.consistent) CHECK(ok);
  CHECK(scan.table[2][1] == doctest::Approx(4.0 * scan.sup_modulus[1]));

  const auto jumpy = fixtures::scalar_jump_model(fixtures::single_atom(0.5, 1.0), 0.0);
  const auto flat = phi_decay_scan(jumpy, 1.0, 1, {10.0, 20.0, 40.0, 80.0});
  CHECK_FALSE(flat.consistent[1]);
  CHECK_THROWS_AS(phi_decay_scan(gauss, 1.0, 1, {2.0, 1.0}), DomainError);
}

TEST_CASE("singularity witness") {
  CHECK(singularity_witness(fixtures::linear_factorial_measure(), 1.0, 5) ==
        doctest::Approx(0.045977525678915478).epsilon(1e-12));
  CHECK(singularity_witness(fixtures::unit_factorial_measure(), 1.0, 5) ==
        doctest::Approx(0.59968773962514377).epsilon(1e-12));
  const double w500 = singularity_witness(fixtures::linear_factorial_measure(), 1.0, 500);
  CHECK(w500 == doctest::Approx(0.9613667985325344).epsilon(1e-10));
  CHECK(w500 >= 0.95);
  // Without drift X(t) = Z(t), so the witness is |φ| at z = 2π·5!.
  const auto levy = fixtures::scalar_jump_model(fixtures::linear_factorial_measure(), 0.0);
  CHECK(std::abs(charfn(levy, 1.0, v1(2.0 * std::numbers::pi * 120.0))) ==
        doctest::Approx(singularity_witness(fixtures::linear_factorial_measure(), 1.0, 5)).epsilon(1e-9));
  CHECK_THROWS_AS(singularity_witness(fixtures::axis_measure(), 1.0, 5), UnsupportedError);
}

TEST_CASE("sign changes of the projected noise direction") {
  // v(τ) = z₁ cosh τ + z₂ sinh τ crosses zero inside (0, 1) or at τ = 0.
  const auto model = fixtures::kolmogorov_modified(fixtures::isotropic_stable(1, 1.2));
  const ExponentEvaluator ev(model, 1.0);
  check_close(ev.psi(v2(1.0, -2.0)), -0.59691167512030153, 1e-9);
  check_close(ev.psi(v2(0.0, 3.0)), -2.8255461048500088, 1e-9);
}
