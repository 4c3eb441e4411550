#pragma once

#include "levyou/model.hpp"

#include <limits>

namespace fixtures {

using namespace levyou;

inline LevyMeasure factorial_measure(WeightRule::Kind kind) {
  LevyMeasure pi(1);
  pi.add(FactorialFamily::radial(Vector::Constant(1, 1.0), {kind, 1.0}));
  return pi;
}
/// Σ n δ_{1/n!}.
inline LevyMeasure linear_factorial_measure() { return factorial_measure(WeightRule::Kind::linear); }
/// Σ δ_{1/n!}.
inline LevyMeasure unit_factorial_measure() { return factorial_measure(WeightRule::Kind::constant); }

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

inline OUModel scalar_jump_model(LevyMeasure pi, double a) {
  return make_model(mat({{a}}), Matrix(), mat({{1.0}}), std::move(pi));
}

inline OUModel gaussian_model(double a = 1.0, double b = 1.0) {
  return make_model(mat({{a}}), mat({{b}}), mat({{1.0}}), LevyMeasure(1));
}

/// dX₁ = X₁dt + dZ, dX₂ = X₁dt.
inline OUModel kolmogorov_first(LevyMeasure pi) {
  return make_model(mat({{1, 0}, {1, 0}}), Matrix(), mat({{1}, {0}}), std::move(pi));
}
inline OUModel kolmogorov_modified(LevyMeasure pi) {
  return make_model(mat({{0, 1}, {1, 0}}), Matrix(), mat({{1}, {0}}), std::move(pi));
}

inline LevyMeasure isotropic_stable(Eigen::Index d, double alpha, double c = 1.0) {
  LevyMeasure pi(d);
  pi.add(RadialDensity::power_law(d, c, alpha, std::numeric_limits<double>::infinity(), {}));
  return pi;
}

inline LevyMeasure axis_measure() {
  LevyMeasure pi(2);
  pi.add(FactorialFamily::radial(Vector::Unit(2, 0), {}));
  return pi;
}

inline LevyMeasure single_atom(double u, double w) {
  LevyMeasure pi(1);
  pi.add(ExplicitAtoms({Vector::Constant(1, u)}, {w}));
  return pi;
}

}  // namespace fixtures
