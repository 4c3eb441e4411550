#pragma once

#include "levyou/model.hpp"
#include "levyou/random.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace levyou {

struct DensityGrid;

enum class SmallJumpPolicy { drop_compensate, gaussian_approx };
std::string to_string(SmallJumpPolicy p);
SmallJumpPolicy small_jump_policy_from_string(const std::string& s);

struct SimConfig {
  /// Jumps with ‖u‖ ≤ cutoff are not simulated; automatic when unset.
  std::optional<double> cutoff;
  SmallJumpPolicy policy = SmallJumpPolicy::drop_compensate;
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  long samples = 1000;
  int threads = 1;
};
SimConfig sim_config_from_json(const Json& j, std::uint64_t default_seed = 0);
Json to_json(const SimConfig& c);

/// Walker/Vose alias table over a finite discrete law.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& weights);
  std::size_t size() const { return prob_.size(); }
  std::size_t draw(double u01) const;

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

/// Jump-sampling plan: cutoff, per-component masses above it, samplers, and
/// the compensation/dropped-variance bookkeeping.
struct JumpPlan {
  double cutoff = 0.0;
  /// Π(‖u‖ > cutoff), per unit time.
  double intensity = 0.0;
  std::vector<double> component_mass;
  AliasTable component_table;
  std::vector<std::vector<WeightedAtom>> atoms;  // atomic components only
  std::vector<AliasTable> atom_tables;
  /// Per component ∫_{cutoff<‖u‖≤1} u Π(du).
  std::vector<Vector> compensation;
  /// ∫_{‖u‖≤cutoff} uuᵀ Π(du), summed over components.
  Matrix small_covariance;
  double dropped_variance = 0.0;
};

/// Smallest cutoff with t·Π(‖u‖ > cutoff) ≤ 1e4, or 0 when the whole measure
/// can be simulated.
double default_cutoff(const LevyMeasure& pi, double t);
JumpPlan make_jump_plan(const LevyMeasure& pi, double t, const SimConfig& cfg);

struct Jump {
  double time = 0.0;
  Vector mark;
  int component = 0;
};

/// One realization of the driving noise on a time grid 0 = t_0 < … < t_n.
struct NoiseRealization {
  /// Per interval, the propagated Gaussian increment ∫ e^{(t_k−s)A}B dW.
  std::vector<Vector> gaussian;
  std::vector<Jump> jumps;  // sorted by time
  /// Components whose compensation drift belongs to this realization.
  std::vector<int> components;
};

/// Everything shared by the samples of one run on a fixed time grid.
struct SimulationPlan {
  std::vector<double> grid;
  JumpPlan jumps;
  /// Per interval k (t_{k−1}, t_k]: e^{ΔA}, ∫_0^Δ e^{sA} ds and a square
  /// root of the Gaussian covariance (including folded small jumps).
  std::vector<Matrix> propagator, integrated, gaussian_factor;
};
SimulationPlan make_simulation_plan(const OUModel& model, std::vector<double> grid, const SimConfig& cfg);

/// Draws the noise for sample `index` of (seed, stream).
NoiseRealization draw_noise(const OUModel& model, const SimulationPlan& plan, const SimConfig& cfg,
                            std::uint64_t index);

/// X at every grid node (t_0 included) for the given noise. Linear in the
/// noise when include_deterministic is false.
std::vector<Vector> propagate(const OUModel& model, const SimulationPlan& plan,
                              const NoiseRealization& noise, bool include_deterministic = true);

/// Splits a realization by driving source: `first` keeps the Gaussian part and
/// the jumps of the listed components; `second` keeps the remaining jumps.
std::pair<NoiseRealization, NoiseRealization> split_noise(const NoiseRealization& noise,
                                                          const std::vector<int>& first_components,
                                                          int n_components);

struct SampleBatch {
  double t = 0.0;
  int m = 0;
  Matrix samples;  // n x m
  SimConfig config;
  double cutoff = 0.0;
  double intensity = 0.0;
  double expected_jumps = 0.0;
  double dropped_variance = 0.0;
};

SampleBatch sample_endpoint(const OUModel& model, double t, const SimConfig& cfg);

struct PathBatch {
  std::vector<double> grid;
  int m = 0;
  /// paths[i][k] = X_i(t_k).
  std::vector<std::vector<Vector>> paths;
  SimConfig config;
  double cutoff = 0.0;
};
PathBatch sample_path(const OUModel& model, const std::vector<double>& grid, const SimConfig& cfg);

struct DensityComparison {
  std::optional<double> ks;
  double ks_critical = 0.0;  // 1% level, 1.63/√n
  double l1 = 0.0;
  int bins = 0;
  std::vector<double> z_scores;
  double outside_fraction = 0.0;
  bool pass = false;
};
/// 1-d: KS statistic and L1 over `bins` equal bins of the grid range.
/// 2-d: L1 over a √bins × √bins partition.
DensityComparison compare_to_density(const SampleBatch& batch, const DensityGrid& grid, int bins = 256,
                                     double l1_threshold = 0.05);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace levyou
