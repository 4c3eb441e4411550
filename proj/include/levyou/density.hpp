#pragma once

#include "levyou/charfn.hpp"
#include "levyou/simulate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace levyou {

struct GridRequest {
  /// Axis ranges; automatic (mean ± 12 sd) when unset.
  std::vector<double> x_min, x_max;
  int min_points = 1024;
  int max_points = 1 << 22;
  double phi_floor = 1e-8;
  double z_cap = 1e6;
  /// Invert even when the report says the density is not smooth.
  bool force = false;
  int threads = 1;
};
GridRequest grid_request_from_json(const Json& j);

struct DensityGrid {
  int dim = 1;
  std::vector<double> x_min, x_max;
  std::vector<int> points;
  /// Row-major: values[i * points[1] + j] for 2-d.
  std::vector<double> values;
  std::vector<double> z_max;
  double tail_modulus = 0.0;
  /// Σ values · cell volume after clipping.
  double normalization = 0.0;
  /// Mass of the clipped negative part, and the most negative raw value.
  double clipped_mass = 0.0;
  double min_raw = 0.0;
  std::vector<std::string> warnings;

  double step(int axis) const { return (x_max[axis] - x_min[axis]) / points[axis]; }
  double coord(int axis, int i) const { return x_min[axis] + i * step(axis); }
  double cell_volume() const;
  /// Linear (1-d) or bilinear (2-d) interpolation; 0 outside the range.
  double at(const Vector& x) const;
};
Json metadata_to_json(const DensityGrid& g);

DensityGrid invert_1d(const OUModel& model, double t, const GridRequest& req = {});
DensityGrid invert_2d(const OUModel& model, double t, const GridRequest& req = {});
/// Density of (X(t), l) for ‖l‖ = 1, any m.
DensityGrid invert_projection(const OUModel& model, double t, const Vector& l, const GridRequest& req = {});

/// Smallest radius along `dir` where |φ| drops below `floor`, capped at `cap`;
/// `modulus` is |φ| there.
struct CutoffSearch {
  double radius = 0.0;
  double modulus = 0.0;
  bool capped = false;
};
CutoffSearch phi_cutoff(const ExponentEvaluator& ev, const Vector& dir, double floor, double cap);

/// Mean of X(t) on the event of no jumps in (ε, 1]:
/// deterministic part + ∫_0^t e^{sA} ds · D · ∫_{ε<‖u‖≤1} u Π(du).
Vector window_center(const OUModel& model, double t, double eps);

struct WindowBound {
  double no_jump = 0.0;    // ε^{tρ(ε)}
  double chebyshev = 0.0;  // ‖D‖² t e^{2|A|t} ε² ln(1/ε) ρ(ε) / w²
  double value = 0.0;
  bool vacuous = false;
};
/// Lower bound for P(|X(t) − M(t,ε)| ≤ w); w = √ε unless given.
WindowBound window_bound(const OUModel& model, double t, double eps, std::optional<double> half_width = {});
double window_lower_bound(const OUModel& model, double t, double eps);

struct LpProbeRow {
  double eps = 0.0;
  double center = 0.0;
  double lo = 0.0, hi = 0.0;
  double bound = 0.0;
  double bound_ratio = 0.0;  // bound / (hi − lo)^{2−2α}
  long hits = 0;
  double mc_probability = 0.0;
  double mc_ratio = 0.0;
  bool insufficient = true;
};
struct LpProbe {
  double p = 2.0;
  double alpha = 0.75;
  double t = 0.0;
  long mc_samples = 0;
  std::vector<LpProbeRow> rows;
  /// Bound ratio strictly increasing as ε decreases.
  bool bound_ratio_increasing = false;
};
LpProbe lp_irregularity_probe(const OUModel& model, double t, double p, std::vector<double> eps,
                              long mc_samples, const SimConfig& sim = {});

}  // namespace levyou
