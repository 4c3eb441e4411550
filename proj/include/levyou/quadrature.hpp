#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cstddef>
#include <vector>

namespace levyou {

/// Full-range Gauss–Legendre rule on [-1, 1] assembled from Boost's
/// half-range tables.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

template <unsigned Points>
const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, Points>;
    GaussRule r;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        r.nodes.push_back(0.0);
        r.weights.push_back(w[i]);
        continue;
      }
      r.nodes.push_back(-x[i]);
      r.weights.push_back(w[i]);
      r.nodes.push_back(x[i]);
      r.weights.push_back(w[i]);
    }
    return r;
  }();
  return rule;
}

/// Composite Gauss–Legendre on [a, b] with equal panels; f may return any
/// type closed under addition and scaling by double.
template <unsigned Points = 16, class F>
auto gauss_panels(const F& f, double a, double b, int panels) -> decltype(f(a)) {
  const GaussRule& rule = gauss_rule<Points>();
  using R = decltype(f(a));
  R total{};
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    R acc{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    total += (0.5 * h) * acc;
  }
  return total;
}

/// Nodes and weights of the composite rule, for callers that evaluate
/// vector-valued integrands themselves.
template <unsigned Points = 16>
void composite_nodes(double a, double b, int panels, std::vector<double>& x,
                     std::vector<double>& w) {
  const GaussRule& rule = gauss_rule<Points>();
  x.clear();
  w.clear();
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      x.push_back(mid + 0.5 * h * rule.nodes[i]);
      w.push_back(0.5 * h * rule.weights[i]);
    }
  }
}

}  // namespace levyou
