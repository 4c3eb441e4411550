#pragma once

#include "levyou/criteria.hpp"
#include "levyou/model.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace levyou {

using CVector = Eigen::VectorXcd;

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;  // relative to ∫|integrand|
  int max_panels = 1 << 16;
};

/// ψ_{X(t)} and its derivatives for one (model, t). Thread-safe; node
/// tables for the s-quadrature are cached on first use.
class ExponentEvaluator {
 public:
  ExponentEvaluator(const OUModel& model, double t, QuadratureOptions opt = {});

  const OUModel& model() const { return model_; }
  double t() const { return t_; }
  const Matrix& gaussian_covariance() const { return sigma_; }
  /// Mean of the deterministic part, e^{tA}x0 + ∫_0^t e^{sA}a ds.
  const Vector& shift() const { return shift_; }

  Complex psi(const Vector& z) const;
  /// exp(ψ(z) + i(shift, z)).
  Complex charfn(const Vector& z) const;
  CVector gradient(const Vector& z) const;
  /// Mixed partial ∂^r ψ / ∂z_{j1}…∂z_{jr}, r = index.size() ≥ 1.
  Complex derivative(const Vector& z, const std::vector<int>& index) const;

 private:
  struct Level {
    std::vector<double> weights;
    std::vector<Matrix> maps;  // e^{τA} D at each node
  };
  const Level& level(int panels) const;
  Complex jump_integral(const Vector& z, const std::vector<int>& index, bool closed_form) const;
  Complex scalar_atoms(const Vector& z, int r) const;
  double phase_bound(const Vector& z) const;
  /// e^{τA} D for arbitrary τ ∈ [0, t], by a short Taylor step from a tabulated node.
  Matrix map_at(double tau) const;
  /// Zeros in (0, t) of the scalar (e^{τA}D)ᵀz when d = 1: the integrand of a
  /// density component is not smooth there.
  std::vector<double> kinks(const Vector& z) const;
  Complex graded_integral(const Vector& z, const std::vector<int>& index,
                          const std::vector<const MeasureComponent*>& comps,
                          const std::vector<double>& kinks) const;

  OUModel model_;
  double t_;
  QuadratureOptions opt_;
  Matrix sigma_;
  Vector shift_;
  bool scalar_closed_form_;
  bool kink_sensitive_ = false;
  double table_step_ = 0.0;
  std::vector<Matrix> table_;        // e^{kh A}, k = 0…K
  std::vector<Matrix> taylor_;       // A^j / j!
  mutable std::mutex mu_;
  mutable std::map<int, std::unique_ptr<Level>> levels_;
};

Complex psi(const OUModel& model, double t, const Vector& z);
Complex charfn(const OUModel& model, double t, const Vector& z);
CVector psi_gradient(const OUModel& model, double t, const Vector& z);
Complex psi_derivative(const OUModel& model, double t, const Vector& z, const std::vector<int>& index);

/// Majorant of |∂^r ψ|: for r = 1 the bound is slope·‖z‖ + intercept, for
/// r ≥ 2 `value` (intercept is unused). `infinite` when a needed moment
/// of Π diverges.
struct DerivativeBound {
  int r = 1;
  double slope = 0.0;
  double value = 0.0;
  bool infinite = false;
  double bound_at(double znorm) const { return r == 1 ? slope * znorm + value : value; }
};
DerivativeBound derivative_bound(const OUModel& model, double t, int r);

/// Explicit constants of the scalar decay bound (A > 0).
struct ScalarDecayConstants {
  double t = 0.0;
  double A = 0.0;
  double beta = 0.0;
  double C = 0.0;
  double C1 = 0.0;
  double gamma = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
};
ScalarDecayConstants theorem1_constants(double A, double t);
/// sup_{|y| > c} |sin y / y|.
double sinc_sup_beyond(double c);
/// (β/|z|)^{C₃ ρ(β/|z|)} for scalar jump models dX = AX dt + dZ, |z| > β.
double theorem1_bound(const OUModel& model, double t, double z);

/// Φ(r) = r² inf_l ∫_{|(u,l)|≤1/r} (u,l)² Π(du) over sampled l.
double phi_big(const LevyMeasure& pi, double r, const SphereSampling& s = {});

/// Φ(r)/ln r tabulated on r = 10^{j/4}, j = 4…48, and classified.
DirectionalDiagnostic phi_growth_diagnostic(const LevyMeasure& pi, const SphereSampling& s = {},
                                            const LimitThresholds& th = {});

struct Lemma1Estimate {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  int directions = 0;
  int s_points = 2048;
  Vector worst_direction;
};
/// min over sampled unit l of λ{s ≤ t : ‖Bᵀe^{sAᵀ}l‖ > α or ‖Dᵀe^{sAᵀ}l‖ > β}.
Lemma1Estimate lemma1_gamma(const OUModel& model, double t, double alpha, double beta,
                            const SphereSampling& s = {});

/// exp{−γ min(½α²‖z‖², (1 − cos 1)·Φ(β‖z‖))}, an estimate-based majorant of |φ|.
double theorem2_bound(const OUModel& model, const Vector& z, const Lemma1Estimate& est,
                      const SphereSampling& s = {});

struct DecayScan {
  std::vector<double> radii;
  int n_max = 0;
  /// sup_{‖z‖ = R, sampled} |φ(z)| per radius.
  std::vector<double> sup_modulus;
  /// table[n][i] = R_i^n · sup_modulus[i].
  std::vector<std::vector<double>> table;
  /// Per n: strictly decreasing over the last half of the radii.
  std::vector<bool> consistent;
};
DecayScan phi_decay_scan(const OUModel& model, double t, int n_max, const std::vector<double>& radii,
                         int directions = 32);

/// |E exp(i 2π N! Z(t))| for a factorial radial family in d = 1, by the
/// direct product over atoms of order n > N.
double singularity_witness(const LevyMeasure& pi, double t, int N);

}  // namespace levyou
