#pragma once

#include <complex>

namespace levyou {

using Complex = std::complex<double>;

/// ∫_a^b x^p dx for 0 ≤ a ≤ b (b may be +inf when p < -1; a may be 0 when
/// p > -1). Handles p = -1 and nearly equal endpoints without cancellation.
double power_integral(double p, double a, double b);

/// ∫_a^b x^q (e^{ix} − Σ_{k<k0} (ix)^k / k!) dx for 0 ≤ a ≤ b ≤ +inf.
///
/// Short ranges near the origin use the power series of e^{ix}; long ranges
/// rotate the contour onto vertical rays, where the integrand decays like
/// e^{-y}. Throws DomainError when the integral diverges.
Complex osc_power_integral(double q, double a, double b, int k0);

}  // namespace levyou
