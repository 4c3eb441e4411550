#pragma once

#include "levyou/json_io.hpp"
#include "levyou/levy_measure.hpp"

#include <cstdint>

namespace levyou {

/// dX = (AX + a) dt + B dW + D dZ, X(0) = x0, with Z a pure-jump Lévy
/// process on R^d with Lévy measure `measure`.
struct OUModel {
  int m = 1;
  int k = 0;
  int d = 1;
  Matrix A;
  Matrix B;  // m x k (k may be 0)
  Matrix D;  // m x d
  Vector a;
  Vector x0;
  LevyMeasure measure{1};

  bool has_gaussian() const { return B.size() > 0 && B.norm() > 0.0; }
  bool is_scalar() const { return m == 1 && d == 1; }
};

/// Checks block shapes and finiteness; throws DimensionError naming the block.
void validate(const OUModel& model);

/// Convenience constructor for tests and fixtures; validates.
OUModel make_model(Matrix A, Matrix B, Matrix D, LevyMeasure measure,
                   Vector a = Vector(), Vector x0 = Vector());

/// Parses the "measure" section: {components: [...], n_max}.
LevyMeasure load_measure(const Json& doc, Eigen::Index d);
Json measure_to_json(const LevyMeasure& pi);
/// Parses the "model" and "measure" sections of a config document.
OUModel load_model(const Json& config);
Json model_to_json(const OUModel& model);

/// The "run" section.
struct RunConfig {
  double t = 1.0;
  std::uint64_t seed = 0;
  Json tolerances = Json::object();
};
RunConfig load_run(const Json& config);

/// Σ(t) = ∫_0^t e^{sA} B Bᵀ e^{sAᵀ} ds by Gauss–Legendre panels, doubled
/// until the relative change is below `rel_tol`.
Matrix gaussian_covariance(const OUModel& model, double t, double rel_tol = 1e-12);

/// e^{tA} x0 + ∫_0^t e^{sA} ds · a.
Vector deterministic_part(const OUModel& model, double t);

}  // namespace levyou
