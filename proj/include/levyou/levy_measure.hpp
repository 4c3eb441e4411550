#pragma once

#include "levyou/linalg.hpp"
#include "levyou/oscillatory.hpp"

#include <concepts>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace levyou {

/// Weight sequence w_n of an atom family: constant c or linear c·n.
struct WeightRule {
  enum class Kind { constant, linear };
  Kind kind = Kind::constant;
  double c = 1.0;

  double at(long n) const { return kind == Kind::constant ? c : c * static_cast<double>(n); }
  /// Σ_{n=1}^{N} w_n.
  double partial_sum(long n) const;
};

struct WeightedAtom {
  Vector point;
  double weight = 0.0;
};

/// Uniform scalar source used by mark samplers; returns values in (0, 1).
using UniformSource = std::function<double()>;

/// One additive piece of a Lévy measure on R^d. Implementations are
/// immutable after construction.
class MeasureComponent {
 public:
  virtual ~MeasureComponent() = default;

  virtual std::string kind() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual bool infinite_mass() const = 0;
  /// Π(‖u‖ > ε), ε > 0.
  virtual double mass_above(double eps) const = 0;
  /// ∫ (‖u‖² ∧ ε²) Π(du).
  virtual double clipped_second_moment(double eps) const = 0;
  /// ∫_{‖u‖ ≤ ε} ‖u‖² Π(du).
  virtual double small_ball_second_moment(double eps) const = 0;
  /// ∫_{|(u,l)| ≤ ε} (u,l)² Π(du).
  virtual double directional_truncated_moment(const Vector& l, double eps) const = 0;
  /// ∫_{‖u‖>1} ‖u‖^n Π(du); +inf when divergent.
  virtual double moment_above_one(int n) const = 0;
  /// ∫_{lo<‖u‖≤hi} u Π(du).
  virtual Vector compensator_mean(double lo, double hi) const = 0;
  /// ∫_{‖u‖≤ε} u uᵀ Π(du).
  virtual Matrix small_jump_covariance(double eps) const = 0;
  /// Minimal subspace carrying all but finitely much mass of this component.
  virtual Subspace tail_span(int n_max, double tol) const = 0;

  /// ∫(‖u‖²∧ε²)Π / ε² and ∫_{‖u‖≤ε}‖u‖²Π / ε² with ε = exp(log_eps);
  /// usable far below the double range of ε.
  virtual double scaled_clipped_moment(double log_eps) const = 0;
  virtual double scaled_small_ball_moment(double log_eps) const = 0;
  /// log‖u_n‖ for closed-form factorial families, empty otherwise.
  virtual bool has_factorial_scales() const { return false; }
  virtual double log_atom_norm(long /*n*/) const { return 0.0; }

  /// ∫ [e^{i(u,v)} − 1 − i(u,v)·1{‖u‖≤1}] Π(du).
  virtual Complex exponent_integrand(const Vector& v, int n_max) const = 0;
  /// ∫ i^r Π_l (u,w_l) [e^{i(u,v)} − 1{r=1, ‖u‖≤1}] Π(du), r = dirs.size() ≥ 1.
  virtual Complex derivative_integrand(const Vector& v, const std::vector<Vector>& dirs,
                                       int n_max) const = 0;
  /// Largest ‖u‖ in the support (inf if unbounded); used to size quadrature.
  virtual double support_radius() const = 0;

  /// Atomic components: materialized atoms (factorial families up to n_max).
  virtual bool is_atomic() const = 0;
  virtual std::vector<WeightedAtom> atoms(int n_max) const { (void)n_max; return {}; }
  /// Atoms with ‖u‖ > ε (always finitely many).
  virtual std::vector<WeightedAtom> atoms_above(double eps) const { (void)eps; return {}; }
  /// Density components: draw from Π restricted to ‖u‖ > ε, normalized.
  virtual Vector draw_above(double eps, const UniformSource& u01) const;
};

/// Finite explicit list of atoms.
class ExplicitAtoms final : public MeasureComponent {
 public:
  ExplicitAtoms(std::vector<Vector> points, std::vector<double> weights);

  std::string kind() const override { return "atoms"; }
  Eigen::Index dim() const override { return dim_; }
  bool infinite_mass() const override { return false; }
  double mass_above(double eps) const override;
  double clipped_second_moment(double eps) const override;
  double small_ball_second_moment(double eps) const override;
  double directional_truncated_moment(const Vector& l, double eps) const override;
  double moment_above_one(int n) const override;
  Vector compensator_mean(double lo, double hi) const override;
  Matrix small_jump_covariance(double eps) const override;
  Subspace tail_span(int, double) const override { return Subspace(dim_); }
  double scaled_clipped_moment(double log_eps) const override;
  double scaled_small_ball_moment(double log_eps) const override;
  Complex exponent_integrand(const Vector& v, int n_max) const override;
  Complex derivative_integrand(const Vector& v, const std::vector<Vector>& dirs,
                               int n_max) const override;
  double support_radius() const override;
  bool is_atomic() const override { return true; }
  std::vector<WeightedAtom> atoms(int) const override { return atoms_; }
  std::vector<WeightedAtom> atoms_above(double eps) const override;

 private:
  Eigen::Index dim_;
  std::vector<WeightedAtom> atoms_;
};

/// Infinite atom family with closed-form atoms u_n, n ≥ 1:
///   radial: u_n = v / n! for a unit vector v;
///   curve:  u_n = Q (x, x², …, x^d), x = 1/n!, Q orthonormal (default I).
class FactorialFamily final : public MeasureComponent {
 public:
  enum class Shape { radial, curve };

  static FactorialFamily radial(Vector direction, WeightRule weight);
  static FactorialFamily curve(Eigen::Index d, WeightRule weight, Matrix basis = Matrix());

  Shape shape() const { return shape_; }
  const WeightRule& weight() const { return weight_; }
  const Vector& direction() const { return direction_; }
  const Matrix& basis() const { return basis_; }
  /// u_n; coordinates may underflow to 0 for large n.
  Vector atom(long n) const;

  std::string kind() const override {
    return shape_ == Shape::radial ? "factorial_radial" : "factorial_curve";
  }
  Eigen::Index dim() const override { return dim_; }
  bool infinite_mass() const override { return true; }
  double mass_above(double eps) const override;
  double clipped_second_moment(double eps) const override;
  double small_ball_second_moment(double eps) const override;
  double directional_truncated_moment(const Vector& l, double eps) const override;
  double moment_above_one(int n) const override;
  Vector compensator_mean(double lo, double hi) const override;
  Matrix small_jump_covariance(double eps) const override;
  Subspace tail_span(int n_max, double tol) const override;
  double scaled_clipped_moment(double log_eps) const override;
  double scaled_small_ball_moment(double log_eps) const override;
  bool has_factorial_scales() const override { return true; }
  double log_atom_norm(long n) const override;
  Complex exponent_integrand(const Vector& v, int n_max) const override;
  Complex derivative_integrand(const Vector& v, const std::vector<Vector>& dirs,
                               int n_max) const override;
  double support_radius() const override;
  bool is_atomic() const override { return true; }
  std::vector<WeightedAtom> atoms(int n_max) const override;
  std::vector<WeightedAtom> atoms_above(double eps) const override;

 private:
  FactorialFamily(Shape shape, Eigen::Index d, WeightRule weight, Vector direction,
                  Matrix basis);
  /// Number of atoms with log‖u_n‖ > log_eps.
  long count_above_log(double log_eps) const;
  /// Σ_{n>k} w_n (‖u_n‖/ε)^2 in log space.
  double scaled_tail(long k, double log_eps) const;

  Shape shape_;
  Eigen::Index dim_;
  WeightRule weight_;
  Vector direction_;
  Matrix basis_;
};

/// Absolutely continuous component in polar form: radial Lévy density
/// q(r) dr (piecewise power law, q(r) = coef·r^p on each segment) times a
/// probability law on directions.
class RadialDensity final : public MeasureComponent {
 public:
  struct Segment {
    double coef;
    double p;
    double r_lo;
    double r_hi;  // may be +inf
  };
  struct Directions {
    bool uniform = true;
    std::vector<Vector> vectors;  // unit vectors when not uniform
    std::vector<double> probs;
  };

  /// q(r) = c r^{-1-α} on (0, r_max], α ∈ (0, 2); r_max may be +inf.
  static RadialDensity power_law(Eigen::Index d, double c, double alpha, double r_max,
                                 Directions dirs);
  /// Log-log linear interpolation of positive values at increasing knots.
  static RadialDensity tabulated(Eigen::Index d, std::vector<double> knots,
                                 std::vector<double> values, Directions dirs);

  const std::vector<Segment>& segments() const { return segments_; }
  const Directions& directions() const { return dirs_; }
  /// Stability index for power-law components, NaN for tabulated ones.
  double alpha() const { return alpha_; }
  bool isotropic_unbounded_power_law() const;

  std::string kind() const override { return kind_; }
  Eigen::Index dim() const override { return dim_; }
  bool infinite_mass() const override;
  double mass_above(double eps) const override;
  double clipped_second_moment(double eps) const override;
  double small_ball_second_moment(double eps) const override;
  double directional_truncated_moment(const Vector& l, double eps) const override;
  double moment_above_one(int n) const override;
  Vector compensator_mean(double lo, double hi) const override;
  Matrix small_jump_covariance(double eps) const override;
  Subspace tail_span(int n_max, double tol) const override;
  double scaled_clipped_moment(double log_eps) const override;
  double scaled_small_ball_moment(double log_eps) const override;
  Complex exponent_integrand(const Vector& v, int n_max) const override;
  Complex derivative_integrand(const Vector& v, const std::vector<Vector>& dirs,
                               int n_max) const override;
  double support_radius() const override;
  bool is_atomic() const override { return false; }
  Vector draw_above(double eps, const UniformSource& u01) const override;

  /// ∫ q(r) r^k dr over (lo, hi].
  double radial_moment(double k, double lo, double hi) const;
  /// Σ_seg coef ∫ r^{p+k} [e^{irc} − Σ_{j<k0} (irc)^j/j! · 1{r ≤ cut}] dr.
  Complex radial_oscillatory(double c, double k, int k0, double cut) const;

 private:
  RadialDensity(std::string kind, Eigen::Index d, std::vector<Segment> segments,
                Directions dirs, double alpha);
  /// E_θ f((θ, l)) under the direction law, for ‖l‖ = 1.
  double direction_average(const Vector& l, const std::function<double(double)>& f) const;

  std::string kind_;
  Eigen::Index dim_;
  std::vector<Segment> segments_;
  Directions dirs_;
  double alpha_;
  /// κ in ∫[e^{i(u,v)} − 1 − i(u,v)1{‖u‖≤1}]Π(du) = κ‖v‖^α (isotropic case).
  double stable_constant_ = 0.0;
};

/// E|θ₁|^a for θ uniform on the unit sphere of R^d.
double sphere_abs_moment(Eigen::Index d, double a);

/// Quadrature rule for the uniform probability on the unit sphere of R^d
/// (d = 1, 2, 3 exact-by-construction rules of moderate size).
struct SphereRule {
  std::vector<Vector> nodes;
  std::vector<double> weights;
};
const SphereRule& sphere_rule(Eigen::Index d);

/// A Lévy measure on R^d: a sum of components. An empty component list is the
/// zero measure.
class LevyMeasure {
 public:
  explicit LevyMeasure(Eigen::Index d, int n_max = 30);
  LevyMeasure& add(std::shared_ptr<const MeasureComponent> component);
  template <class C>
    requires std::derived_from<C, MeasureComponent>
  LevyMeasure& add(C component) {
    return add(std::shared_ptr<const MeasureComponent>(
        std::make_shared<const C>(std::move(component))));
  }

  Eigen::Index dim() const { return dim_; }
  int n_max() const { return n_max_; }
  const std::vector<std::shared_ptr<const MeasureComponent>>& components() const {
    return components_;
  }
  bool is_zero() const { return components_.empty(); }
  bool infinite_mass() const;
  double total_mass() const;
  /// Measure made of the listed components only.
  LevyMeasure subset(const std::vector<std::size_t>& indices) const;
  bool has_factorial_family() const;

 private:
  Eigen::Index dim_;
  int n_max_;
  std::vector<std::shared_ptr<const MeasureComponent>> components_;
};

double mass_above(const LevyMeasure& pi, double eps);
/// 1-d only: ∫ (u² ∧ ε²) Π(du).
double truncated_second_moment(const LevyMeasure& pi, double eps);
/// 1-d only: ∫_{|u|≤ε} u² Π(du).
double small_ball_second_moment(const LevyMeasure& pi, double eps);
/// ρ(ε) = [ε² ln(1/ε)]⁻¹ ∫ (u² ∧ ε²) Π(du), 0 < ε < 1.
double rho(const LevyMeasure& pi, double eps);
/// ρ evaluated at ε = exp(log_eps) without forming ε.
double rho_log(const LevyMeasure& pi, double log_eps);
/// Kallenberg quotient [ε² ln(1/ε)]⁻¹ ∫_{|u|≤ε} u² Π(du) at ε = exp(log_eps).
double kallenberg_ratio_log(const LevyMeasure& pi, double log_eps);
double directional_truncated_moment(const LevyMeasure& pi, const Vector& l, double eps);
double moment_above_one(const LevyMeasure& pi, int n);
/// ∫_{‖u‖≤1} ‖u‖² Π(du).
double second_moment_below_one(const LevyMeasure& pi);
Vector compensator_mean(const LevyMeasure& pi, double lo, double hi);
Matrix small_jump_covariance(const LevyMeasure& pi, double eps);
Subspace essential_linear_support(const LevyMeasure& pi,
                                  std::optional<double> tol = std::nullopt);

struct YamazatoResult {
  bool holds = false;
  Subspace support;
};
YamazatoResult yamazato_check(const LevyMeasure& pi, std::optional<double> tol = std::nullopt);

/// Outcome of a finite-evidence limit heuristic.
enum class LimitClass { diverges, vanishes, bounded, undecided };
std::string to_string(LimitClass c);
LimitClass limit_class_from_string(const std::string& s);

struct LimitThresholds {
  double diverge_min = 10.0;
  double vanish_max = 0.1;
  int tail = 5;
  /// |slope| below this (with values in the bounded band) reads as bounded.
  double bounded_slope = 0.1;
};

/// A quotient tabulated against ln(1/ε) and its classification.
struct GrowthProfile {
  std::string grid;  // "dyadic" or "factorial"
  std::vector<double> log_inv_eps;
  std::vector<double> values;
  /// Least-squares slope of log value against log log(1/ε) over the tail.
  double slope = 0.0;
  LimitClass cls = LimitClass::undecided;
};

/// Classifies the tail of a profile with the documented thresholds.
void classify_profile(GrowthProfile& profile, const LimitThresholds& th = {});

/// Evaluates f(log ε) on ε = 2^{-j}, j = 4…40.
GrowthProfile dyadic_profile(const std::function<double(double)>& f_of_log_eps,
                             const LimitThresholds& th = {});

/// Lower envelope of f over the intervals between consecutive atom scales of
/// the measure's factorial families, indexed out to atoms of order ~1e6.
/// Empty (grid "none") when the measure has no factorial family.
GrowthProfile factorial_envelope_profile(const LevyMeasure& pi,
                                         const std::function<double(double)>& f_of_log_eps,
                                         const LimitThresholds& th = {});

}  // namespace levyou
