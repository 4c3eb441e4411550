#pragma once

#include "levyou/json_io.hpp"
#include "levyou/levy_measure.hpp"
#include "levyou/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace levyou {

enum class Verdict { holds, fails, undecided };
enum class Tri { yes, no, undecided };

std::string to_string(Verdict v);
std::string to_string(Tri v);
Verdict verdict_from_string(const std::string& s);
Tri tri_from_string(const std::string& s);

/// Maps a limit classification to a verdict on "the quotient → +∞".
Verdict divergence_verdict(LimitClass c);

struct RankReport {
  std::string id;  // kalman, H1, H2, H2prime
  Matrix block;
  int rank = 0;
  int required = 0;
  bool holds = false;
  double margin = 0.0;
  /// Retained singular values closer than 1e-6·σ_max to the cutoff region.
  bool fragile = false;
  Vector singular_values;
};

/// [B, AB, …, A^{m-1}B].
RankReport kalman_check(const Matrix& A, const Matrix& B);
/// [B, …, A^{m-1}B, D, …, A^{m-1}D].
RankReport h1_check(const Matrix& A, const Matrix& B, const Matrix& D);
/// [AD, …, A^m D].
RankReport h2_check(const Matrix& A, const Matrix& D);
/// [B, …, A^{m-1}B, AD, …, A^m D].
RankReport h2prime_check(const Matrix& A, const Matrix& B, const Matrix& D);

struct MassReport {
  bool infinite = false;
  double total_mass = 0.0;  // +inf when infinite
  /// e^{-tQ}: mass of the no-jump atom when Q = Π(R^d) < ∞ and t is given.
  std::optional<double> atom_mass;
};
MassReport infinite_mass_check(const LevyMeasure& pi, std::optional<double> t = std::nullopt);

struct LimitDiagnostic {
  LimitClass cls = LimitClass::undecided;
  GrowthProfile dyadic;
  GrowthProfile factorial;  // grid "none" without factorial families
  /// Quotient at ε = 1/N! for N = 5…12 when a factorial family is present.
  std::vector<std::pair<int, double>> atom_sequence;
};

/// Clipped quotient ρ(ε) = [ε² ln(1/ε)]⁻¹ ∫(u² ∧ ε²)Π, d = 1.
LimitDiagnostic condition_iii_diagnostic(const LevyMeasure& pi, const LimitThresholds& th = {});
/// Truncated quotient [ε² ln(1/ε)]⁻¹ ∫_{|u|≤ε} u² Π, d = 1.
LimitDiagnostic kallenberg_1d_diagnostic(const LevyMeasure& pi, const LimitThresholds& th = {});

struct SphereSampling {
  int samples = 512;
  int refine_rounds = 3;
  int refine_draws = 32;
  std::uint64_t seed = 0;
};

struct SphereInfimum {
  double value = 0.0;
  Vector direction;
};
/// inf over sampled unit l of ∫_{|(u,l)|≤ε} (u,l)² Π(du), with local
/// refinement around the best sample. Exact (l = ±1) in d = 1.
SphereInfimum directional_infimum(const LevyMeasure& pi, double eps, const SphereSampling& s = {});

struct DirectionalDiagnostic {
  LimitClass cls = LimitClass::undecided;
  GrowthProfile profile;
  Vector worst_direction;  // at the smallest ε of the grid
};
/// [ε² ln(1/ε)]⁻¹ inf_l ∫_{|(u,l)|≤ε}(u,l)²Π on the dyadic grid.
DirectionalDiagnostic condition32_diagnostic(const LevyMeasure& pi, const SphereSampling& s = {},
                                             const LimitThresholds& th = {});

struct HypoellipticMass {
  double mass = 0.0;     // mass of materialized atoms and finite parts
  bool infinite = false; // some infinite family qualifies in its tail
};
/// Π(u : l is not orthogonal to span{A^j D u, j = 1…m}) with atoms
/// materialized to depth n_tail.
HypoellipticMass hypoellipticity_mass(const LevyMeasure& pi, const Matrix& A, const Matrix& D,
                                      const Vector& l, int n_tail = 30, double tol = 1e-10);

struct ReportEntry {
  std::string id;
  Verdict verdict = Verdict::undecided;
  Json evidence = Json::object();
};

struct Conclusion {
  Tri value = Tri::undecided;
  std::string rule;  // empty when undecided
  std::vector<std::string> evidence;
};

struct RegularityReport {
  static constexpr int kSchemaVersion = 1;
  int schema_version = kSchemaVersion;
  double t = 0.0;
  std::vector<ReportEntry> entries;
  Conclusion density_exists;
  Conclusion density_smooth;
  /// Density in the Schwartz class (smooth route plus all moments finite).
  Conclusion schwartz;

  const ReportEntry* find(const std::string& id) const;
  /// Multi-line human summary.
  std::string summary() const;
};

struct ReportOptions {
  LimitThresholds thresholds;
  SphereSampling sphere;
  int moment_n_max = 8;
  /// Directions l sampled for the jump-span mass check.
  int hypoelliptic_samples = 64;
};

RegularityReport assemble_report(const OUModel& model, double t, const ReportOptions& opt = {});

Json to_json(const RegularityReport& r);
RegularityReport report_from_json(const Json& j);

/// Reads the optional thresholds from a config "run.tolerances" object.
ReportOptions report_options_from_json(const Json& tolerances, std::uint64_t seed);

}  // namespace levyou
