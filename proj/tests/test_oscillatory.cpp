#include <doctest.h>

#include "levyou/errors.hpp"
#include "levyou/oscillatory.hpp"

#include <cmath>
#include <limits>

using namespace levyou;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

void check_close(Complex got, Complex want, double tol) {
  INFO("got " << got << " want " << want);
  CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}
}  // namespace

TEST_CASE("power integral") {
  CHECK(power_integral(2.0, 0.0, 3.0) == doctest::Approx(9.0));
  CHECK(power_integral(-1.0, 1.0, std::exp(2.0)) == doctest::Approx(2.0));
  CHECK(power_integral(-2.5, 1.0, inf) == doctest::Approx(1.0 / 1.5));
  CHECK(std::isinf(power_integral(-1.0, 1.0, inf)));
  CHECK(std::isinf(power_integral(-1.5, 0.0, 1.0)));
  CHECK(power_integral(-1.0, 1.0, 1.0 + 1e-12) == doctest::Approx(1e-12).epsilon(1e-6));
}

// Reference values from 200-panel adaptive quadrature at 25 digits.
TEST_CASE("finite ranges against high-precision quadrature") {
  check_close(osc_power_integral(0.5, 0.0, 3.0, 0),
              {-0.6475378749721851639, 2.417852012853624576}, 1e-11);
  check_close(osc_power_integral(-1.3, 0.0, 2.0, 1),
              {-0.8212592615834127022, 1.962743096135179030}, 1e-11);
  check_close(osc_power_integral(-1.0, 5.0, 60.0, 0),
              {0.1852165062792006633, 0.03681437131527327505}, 1e-11);
  check_close(osc_power_integral(2.0, 10.0, 40.0, 0),
              {1207.431284962505705, 1054.027487726957386}, 1e-11);
  check_close(osc_power_integral(-1.7, 0.0, 1.0, 2),
              {-0.3722478084663822888, -0.07055694810227756244}, 1e-11);
}

TEST_CASE("half lines against Gamma-function closed forms") {
  // ∫_0^∞ x^{q}(e^{ix}−1) dx = Γ(q+1) e^{iπ(q+1)/2}, −2 < q < −1.
  check_close(osc_power_integral(-1.5, 0.0, inf, 1), {-2.506628274631000502, 2.506628274631000502},
              1e-11);
  // ∫_0^∞ x^{-α-1}(e^{ix}−1−ix) dx = Γ(−α) e^{−iπα/2}.
  check_close(osc_power_integral(-2.5, 0.0, inf, 2), {-1.671085516420667002, -1.671085516420667002},
              1e-11);
  check_close(osc_power_integral(-1.5, 20.0, inf, 0),
              {-0.009779704420140022026, 0.005270987680453530572}, 1e-11);
}

TEST_CASE("additivity over adjacent ranges") {
  for (double q : {-1.8, -1.2, -0.4, 0.0, 1.0}) {
    const int k0 = q < -1.0 ? 2 : 0;
    const Complex whole = osc_power_integral(q, 0.0, 50.0, k0);
    const Complex parts = osc_power_integral(q, 0.0, 3.7, k0) +
                          osc_power_integral(q, 3.7, 21.0, k0) +
                          osc_power_integral(q, 21.0, 50.0, k0);
    check_close(parts, whole, 1e-11);
  }
}

TEST_CASE("divergent requests are refused") {
  CHECK_THROWS_AS(osc_power_integral(-1.5, 0.0, 1.0, 0), DomainError);
  CHECK_THROWS_AS(osc_power_integral(0.5, 1.0, inf, 0), DomainError);
  CHECK_THROWS_AS(osc_power_integral(-0.5, 1.0, inf, 1), DomainError);
}
