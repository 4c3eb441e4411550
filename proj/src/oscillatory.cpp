#include "levyou/oscillatory.hpp"

#include "levyou/errors.hpp"
#include "levyou/quadrature.hpp"

#include <cmath>
#include <limits>

namespace levyou {

namespace {

constexpr double kSeriesCut = 4.0;
constexpr double kDirectSpan = 16.0;
const Complex kI(0.0, 1.0);

Complex ipow(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Σ_{k≥k0} i^k/k! ∫_a^b x^{q+k} dx with b ≤ kSeriesCut.
Complex series_part(double q, double a, double b, int k0) {
  Complex sum{};
  double inv_fact = 1.0;
  for (int k = 1; k <= k0; ++k) inv_fact /= k;
  for (int k = k0; k < 200; ++k) {
    if (k > k0) inv_fact /= k;
    const double term = inv_fact * power_integral(q + k, a, b);
    sum += ipow(k) * term;
    if (k > b + 2 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
    if (term == 0.0 && k > b + 2) break;
  }
  return sum;
}

// i e^{iY} ∫_0^∞ e^{-y} (Y + iy)^q dy, i.e. ∫_Y^{Y + i∞} x^q e^{ix} dx.
Complex vertical_ray(double q, double y0) {
  static constexpr double kEdges[] = {0.0, 1.0, 3.0, 7.0, 15.0, 27.0, 45.0};
  const Complex phase = std::polar(1.0, y0);
  const double scale = std::pow(y0, q);
  Complex acc{};
  for (int e = 0; e + 1 < 7; ++e) {
    acc += gauss_panels<20>(
        [&](double y) {
          return std::exp(-y) * std::pow(Complex(1.0, y / y0), q);
        },
        kEdges[e], kEdges[e + 1], 1);
  }
  return kI * phase * scale * acc;
}

}  // namespace

double power_integral(double p, double a, double b) {
  if (!(b > a)) return 0.0;
  if (std::isinf(b)) {
    if (p >= -1.0) return std::numeric_limits<double>::infinity();
    return std::pow(a, p + 1.0) / -(p + 1.0);
  }
  if (a == 0.0) {
    if (p <= -1.0) return std::numeric_limits<double>::infinity();
    return std::pow(b, p + 1.0) / (p + 1.0);
  }
  const double log_ratio = std::log(b / a);
  if (p == -1.0) return log_ratio;
  return std::pow(a, p + 1.0) * std::expm1((p + 1.0) * log_ratio) / (p + 1.0);
}

Complex osc_power_integral(double q, double a, double b, int k0) {
  if (!(b > a)) return {};
  if (a == 0.0 && q + k0 <= -1.0) {
    throw DomainError("osc_power_integral: integrand not integrable at 0");
  }
  if (std::isinf(b) && (q >= 0.0 || q + k0 - 1 >= -1.0)) {
    throw DomainError("osc_power_integral: integral diverges at infinity");
  }

  Complex total{};
  double lo = a;
  if (a < kSeriesCut) {
    const double hi = std::min(b, kSeriesCut);
    total += series_part(q, a, hi, k0);
    lo = hi;
  }
  if (b <= lo) return total;

  // Remaining range [lo, b] with lo ≥ kSeriesCut.
  Complex osc{};
  if (!std::isinf(b) && b - lo <= kDirectSpan) {
    const int panels = static_cast<int>(std::ceil(b - lo)) + 1;
    osc = gauss_panels<20>([&](double x) { return std::pow(x, q) * std::polar(1.0, x); },
                           lo, b, panels);
  } else {
    osc = vertical_ray(q, lo);
    if (!std::isinf(b)) osc -= vertical_ray(q, b);
  }
  Complex poly{};
  double inv_fact = 1.0;
  for (int k = 0; k < k0; ++k) {
    if (k > 0) inv_fact /= k;
    poly += ipow(k) * (inv_fact * power_integral(q + k, lo, b));
  }
  return total + osc - poly;
}

}  // namespace levyou
