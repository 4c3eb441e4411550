#include "levyou/levy_measure.hpp"

#include "levyou/errors.hpp"
#include "levyou/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace levyou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kMaxEnumerate = 175;
const Complex kI(0.0, 1.0);

const std::array<double, 171>& inv_factorials() {
  static const std::array<double, 171> table = [] {
    std::array<double, 171> t{};
    double fact = 1.0;
    t[0] = 1.0;
    for (int n = 1; n <= 170; ++n) {
      fact *= n;
      t[static_cast<std::size_t>(n)] = 1.0 / fact;
    }
    return t;
  }();
  return table;
}

double inv_factorial(long n) {
  if (n <= 170) return inv_factorials()[static_cast<std::size_t>(n)];
  return 0.0;
}

// e^{iy} − 1 − iy·[compensated], accurate for small |y|.
Complex phase_kernel(double y, bool compensated) {
  const double s = std::sin(0.5 * y);
  const double re = -2.0 * s * s;
  double im;
  if (!compensated) {
    im = std::sin(y);
  } else if (std::abs(y) < 0.1) {
    const double y2 = y * y;
    im = -y * y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0 * (1.0 - y2 / 72.0)));
  } else {
    im = std::sin(y) - y;
  }
  return {re, im};
}

Complex ipow(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

double product_of_projections(const Vector& u, const std::vector<Vector>& dirs) {
  double prod = 1.0;
  for (const auto& w : dirs) prod *= u.dot(w);
  return prod;
}

void require_unit(const Vector& l, const char* what) {
  if (std::abs(l.norm() - 1.0) > 1e-10) {
    throw DomainError(std::string(what) + ": direction must have unit norm");
  }
}

}  // namespace

double WeightRule::partial_sum(long n) const {
  const auto nn = static_cast<double>(n);
  return kind == Kind::constant ? c * nn : c * nn * (nn + 1.0) / 2.0;
}

Vector MeasureComponent::draw_above(double, const UniformSource&) const {
  throw UnsupportedError("draw_above: component is atomic");
}

// ---------------------------------------------------------------- atoms

ExplicitAtoms::ExplicitAtoms(std::vector<Vector> points, std::vector<double> weights) {
  if (points.size() != weights.size()) {
    throw ConfigError("atoms: points and weights differ in length");
  }
  dim_ = points.empty() ? 1 : points.front().size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim_) throw DimensionError("atoms: mixed point dimensions");
    if (!points[i].allFinite()) throw ConfigError("atoms: non-finite point");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw ConfigError("atoms: weights must be positive and finite");
    }
    if (points[i].norm() == 0.0) throw ConfigError("atoms: atom at the origin");
    atoms_.push_back({std::move(points[i]), weights[i]});
  }
}

double ExplicitAtoms::mass_above(double eps) const {
  double m = 0.0;
  for (const auto& a : atoms_) {
    if (a.point.norm() > eps) m += a.weight;
  }
  return m;
}

double ExplicitAtoms::clipped_second_moment(double eps) const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight * std::min(a.point.squaredNorm(), eps * eps);
  return s;
}

double ExplicitAtoms::small_ball_second_moment(double eps) const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    if (a.point.norm() <= eps) s += a.weight * a.point.squaredNorm();
  }
  return s;
}

double ExplicitAtoms::directional_truncated_moment(const Vector& l, double eps) const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    const double c = a.point.dot(l);
    if (std::abs(c) <= eps) s += a.weight * c * c;
  }
  return s;
}

double ExplicitAtoms::moment_above_one(int n) const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    const double r = a.point.norm();
    if (r > 1.0) s += a.weight * std::pow(r, n);
  }
  return s;
}

Vector ExplicitAtoms::compensator_mean(double lo, double hi) const {
  Vector s = Vector::Zero(dim_);
  for (const auto& a : atoms_) {
    const double r = a.point.norm();
    if (r > lo && r <= hi) s += a.weight * a.point;
  }
  return s;
}

Matrix ExplicitAtoms::small_jump_covariance(double eps) const {
  Matrix s = Matrix::Zero(dim_, dim_);
  for (const auto& a : atoms_) {
    if (a.point.norm() <= eps) s += a.weight * a.point * a.point.transpose();
  }
  return s;
}

double ExplicitAtoms::scaled_clipped_moment(double log_eps) const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    const double lr = std::log(a.point.norm());
    s += a.weight * (lr > log_eps ? 1.0 : std::exp(2.0 * (lr - log_eps)));
  }
  return s;
}

double ExplicitAtoms::scaled_small_ball_moment(double log_eps) const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    const double lr = std::log(a.point.norm());
    if (lr <= log_eps) s += a.weight * std::exp(2.0 * (lr - log_eps));
  }
  return s;
}

Complex ExplicitAtoms::exponent_integrand(const Vector& v, int) const {
  Complex s{};
  for (const auto& a : atoms_) {
    s += a.weight * phase_kernel(a.point.dot(v), a.point.norm() <= 1.0);
  }
  return s;
}

Complex ExplicitAtoms::derivative_integrand(const Vector& v, const std::vector<Vector>& dirs,
                                            int) const {
  const int r = static_cast<int>(dirs.size());
  Complex s{};
  for (const auto& a : atoms_) {
    const double y = a.point.dot(v);
    Complex e = std::polar(1.0, y);
    if (r == 1 && a.point.norm() <= 1.0) e = phase_kernel(y, false);
    s += a.weight * product_of_projections(a.point, dirs) * e;
  }
  return ipow(r) * s;
}

double ExplicitAtoms::support_radius() const {
  double r = 0.0;
  for (const auto& a : atoms_) r = std::max(r, a.point.norm());
  return r;
}

std::vector<WeightedAtom> ExplicitAtoms::atoms_above(double eps) const {
  std::vector<WeightedAtom> out;
  for (const auto& a : atoms_) {
    if (a.point.norm() > eps) out.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------- factorial family

FactorialFamily::FactorialFamily(Shape shape, Eigen::Index d, WeightRule weight,
                                 Vector direction, Matrix basis)
    : shape_(shape),
      dim_(d),
      weight_(weight),
      direction_(std::move(direction)),
      basis_(std::move(basis)) {
  if (!(weight_.c > 0.0) || !std::isfinite(weight_.c)) {
    throw ConfigError(kind() + ": weight constant must be positive");
  }
}

FactorialFamily FactorialFamily::radial(Vector direction, WeightRule weight) {
  if (direction.size() == 0) throw DimensionError("factorial_radial: empty direction");
  if (std::abs(direction.norm() - 1.0) > 1e-10) {
    throw ConfigError("factorial_radial: direction must be a unit vector");
  }
  const auto d = direction.size();
  return FactorialFamily(Shape::radial, d, weight, std::move(direction), Matrix());
}

FactorialFamily FactorialFamily::curve(Eigen::Index d, WeightRule weight, Matrix basis) {
  if (d < 1) throw DimensionError("factorial_curve: dimension must be positive");
  if (basis.size() == 0) basis = Matrix::Identity(d, d);
  if (basis.rows() != d || basis.cols() != d) {
    throw DimensionError("factorial_curve: basis must be d x d");
  }
  if ((basis.transpose() * basis - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ConfigError("factorial_curve: basis must be orthonormal");
  }
  return FactorialFamily(Shape::curve, d, weight, Vector(), std::move(basis));
}

Vector FactorialFamily::atom(long n) const {
  const double x = inv_factorial(n);
  if (shape_ == Shape::radial) return x * direction_;
  Vector coords(dim_);
  double p = x;
  for (Eigen::Index k = 0; k < dim_; ++k) {
    coords(k) = p;
    p *= x;
  }
  return basis_ * coords;
}

namespace {

double curve_norm(double x, Eigen::Index d) {
  double s = 0.0;
  double p = 1.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    s += p;
    p *= x * x;
  }
  return x * std::sqrt(s);
}

}  // namespace

double FactorialFamily::log_atom_norm(long n) const {
  const double lx = -std::lgamma(static_cast<double>(n) + 1.0);
  if (shape_ == Shape::radial) return lx;
  const double x = std::exp(lx);
  double s = 0.0;
  double p = 1.0;
  for (Eigen::Index k = 0; k < dim_; ++k) {
    s += p;
    p *= x * x;
  }
  return lx + 0.5 * std::log(s);
}

namespace {

// ‖u_n‖ in double, consistent with user-side 1.0/n! computations.
double family_norm(const FactorialFamily& f, long n) {
  const double x = inv_factorial(n);
  return f.shape() == FactorialFamily::Shape::radial ? x : curve_norm(x, f.dim());
}

}  // namespace

double FactorialFamily::mass_above(double eps) const {
  if (!(eps > 0.0)) return kInf;
  long k = 0;
  while (k < kMaxEnumerate && family_norm(*this, k + 1) > eps) ++k;
  if (k == kMaxEnumerate) k = count_above_log(std::log(eps));
  return weight_.partial_sum(k);
}

double FactorialFamily::clipped_second_moment(double eps) const {
  long k = 0;
  while (k < kMaxEnumerate && family_norm(*this, k + 1) > eps) ++k;
  return eps * eps * weight_.partial_sum(k) + small_ball_second_moment(eps);
}

double FactorialFamily::small_ball_second_moment(double eps) const {
  double s = 0.0;
  for (long n = 1; n <= kMaxEnumerate; ++n) {
    const double r = family_norm(*this, n);
    if (r == 0.0) break;
    if (r > eps) continue;
    const double term = weight_.at(n) * r * r;
    s += term;
    if (term <= 1e-18 * s) break;
  }
  return s;
}

double FactorialFamily::directional_truncated_moment(const Vector& l, double eps) const {
  require_unit(l, "directional_truncated_moment");
  double s = 0.0;
  for (long n = 1; n <= kMaxEnumerate; ++n) {
    const double r = family_norm(*this, n);
    if (r == 0.0) break;
    const double c = atom(n).dot(l);
    if (std::abs(c) <= eps) s += weight_.at(n) * c * c;
    if (r <= eps && weight_.at(n) * r * r <= 1e-18 * s) break;
    if (r <= eps && weight_.at(n) * r * r < 1e-300) break;
  }
  return s;
}

double FactorialFamily::moment_above_one(int n) const {
  double s = 0.0;
  for (long k = 1; k <= kMaxEnumerate; ++k) {
    const double r = family_norm(*this, k);
    if (r <= 1.0) break;
    s += weight_.at(k) * std::pow(r, n);
  }
  return s;
}

Vector FactorialFamily::compensator_mean(double lo, double hi) const {
  Vector s = Vector::Zero(dim_);
  for (long n = 1; n <= kMaxEnumerate; ++n) {
    const double r = family_norm(*this, n);
    if (r <= lo || r == 0.0) break;
    if (r <= hi) s += weight_.at(n) * atom(n);
  }
  return s;
}

Matrix FactorialFamily::small_jump_covariance(double eps) const {
  Matrix s = Matrix::Zero(dim_, dim_);
  for (long n = 1; n <= kMaxEnumerate; ++n) {
    const double r = family_norm(*this, n);
    if (r == 0.0) break;
    if (r > eps) continue;
    const Vector u = atom(n);
    s += weight_.at(n) * u * u.transpose();
    if (weight_.at(n) * r * r <= 1e-18 * s.norm()) break;
  }
  return s;
}

Subspace FactorialFamily::tail_span(int n_max, double tol) const {
  // Normalized atoms with index ≥ n_tail, n_tail = 1, 2, …; the first span
  // that repeats for d consecutive n_tail is taken as the tail span.
  std::vector<Vector> dirs;
  for (long n = 1; n <= n_max; ++n) {
    const Vector u = atom(n);
    const double r = u.norm();
    if (r == 0.0) break;
    dirs.push_back(u / r);
  }
  if (dirs.empty()) return Subspace(dim_);
  std::optional<Subspace> current;
  int repeats = 0;
  for (std::size_t start = 0; start < dirs.size(); ++start) {
    std::vector<Vector> tail(dirs.begin() + static_cast<std::ptrdiff_t>(start), dirs.end());
    Subspace s = span_of(tail, dim_, tol);
    if (current && current->same_as(s, 1e-8)) {
      if (++repeats >= dim_ - 1) return *current;
    } else {
      current = std::move(s);
      repeats = 0;
      if (dim_ == 1) return *current;
    }
  }
  return *current;
}

long FactorialFamily::count_above_log(double log_eps) const {
  if (!(log_atom_norm(1) > log_eps)) return 0;
  long lo = 1;
  long hi = 2;
  while (log_atom_norm(hi) > log_eps) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (log_atom_norm(mid) > log_eps) lo = mid; else hi = mid;
  }
  return lo;
}

double FactorialFamily::scaled_tail(long k, double log_eps) const {
  double s = 0.0;
  for (long n = k + 1; n < k + 400; ++n) {
    const double term = weight_.at(n) * std::exp(2.0 * (log_atom_norm(n) - log_eps));
    s += term;
    if (term <= 1e-18 * s || term == 0.0) break;
  }
  return s;
}

double FactorialFamily::scaled_clipped_moment(double log_eps) const {
  const long k = count_above_log(log_eps);
  return weight_.partial_sum(k) + scaled_tail(k, log_eps);
}

double FactorialFamily::scaled_small_ball_moment(double log_eps) const {
  return scaled_tail(count_above_log(log_eps), log_eps);
}

Complex FactorialFamily::exponent_integrand(const Vector& v, int n_max) const {
  Complex s{};
  for (long n = 1; n <= n_max; ++n) {
    const Vector u = atom(n);
    const double r = u.norm();
    if (r == 0.0) break;
    s += weight_.at(n) * phase_kernel(u.dot(v), r <= 1.0);
  }
  return s;
}

Complex FactorialFamily::derivative_integrand(const Vector& v, const std::vector<Vector>& dirs,
                                              int n_max) const {
  const int r = static_cast<int>(dirs.size());
  Complex s{};
  for (long n = 1; n <= n_max; ++n) {
    const Vector u = atom(n);
    const double norm = u.norm();
    if (norm == 0.0) break;
    const double y = u.dot(v);
    const Complex e = (r == 1 && norm <= 1.0) ? phase_kernel(y, false) : std::polar(1.0, y);
    s += weight_.at(n) * product_of_projections(u, dirs) * e;
  }
  return ipow(r) * s;
}

double FactorialFamily::support_radius() const { return family_norm(*this, 1); }

std::vector<WeightedAtom> FactorialFamily::atoms(int n_max) const {
  std::vector<WeightedAtom> out;
  for (long n = 1; n <= n_max; ++n) {
    Vector u = atom(n);
    if (u.norm() == 0.0) break;
    out.push_back({std::move(u), weight_.at(n)});
  }
  return out;
}

std::vector<WeightedAtom> FactorialFamily::atoms_above(double eps) const {
  std::vector<WeightedAtom> out;
  for (long n = 1; n <= kMaxEnumerate; ++n) {
    if (!(family_norm(*this, n) > eps)) break;
    out.push_back({atom(n), weight_.at(n)});
  }
  return out;
}

// ------------------------------------------------------------ radial density

double sphere_abs_moment(Eigen::Index d, double a) {
  const double dd = static_cast<double>(d);
  return std::exp(std::lgamma(dd / 2.0) + std::lgamma((a + 1.0) / 2.0) -
                  0.5 * std::log(std::numbers::pi) - std::lgamma((dd + a) / 2.0));
}

const SphereRule& sphere_rule(Eigen::Index d) {
  static const SphereRule r1 = [] {
    SphereRule r;
    r.nodes = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
    r.weights = {0.5, 0.5};
    return r;
  }();
  static const SphereRule r2 = [] {
    SphereRule r;
    std::vector<double> x, w;
    composite_nodes<8>(0.0, 2.0 * std::numbers::pi, 64, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
      Vector n(2);
      n << std::cos(x[i]), std::sin(x[i]);
      r.nodes.push_back(n);
      r.weights.push_back(w[i] / (2.0 * std::numbers::pi));
    }
    return r;
  }();
  static const SphereRule r3 = [] {
    SphereRule r;
    std::vector<double> x, w;
    composite_nodes<8>(-1.0, 1.0, 16, x, w);
    const int nphi = 64;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double st = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
      for (int j = 0; j < nphi; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / nphi;
        Vector n(3);
        n << st * std::cos(phi), st * std::sin(phi), x[i];
        r.nodes.push_back(n);
        r.weights.push_back(w[i] / 2.0 / nphi);
      }
    }
    return r;
  }();
  switch (d) {
    case 1: return r1;
    case 2: return r2;
    case 3: return r3;
    default: throw UnsupportedError("sphere_rule: uniform directions supported for d <= 3 here");
  }
}

RadialDensity::RadialDensity(std::string kind, Eigen::Index d, std::vector<Segment> segments,
                             Directions dirs, double alpha)
    : kind_(std::move(kind)),
      dim_(d),
      segments_(std::move(segments)),
      dirs_(std::move(dirs)),
      alpha_(alpha) {
  if (d < 1) throw DimensionError(kind_ + ": dimension must be positive");
  if (!dirs_.uniform) {
    if (dirs_.vectors.empty() || dirs_.vectors.size() != dirs_.probs.size()) {
      throw ConfigError(kind_ + ": direction vectors and weights must be non-empty and match");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < dirs_.vectors.size(); ++i) {
      if (dirs_.vectors[i].size() != d) throw DimensionError(kind_ + ": direction dimension");
      if (std::abs(dirs_.vectors[i].norm() - 1.0) > 1e-10) {
        throw ConfigError(kind_ + ": directions must be unit vectors");
      }
      if (!(dirs_.probs[i] > 0.0)) throw ConfigError(kind_ + ": direction weights must be > 0");
      total += dirs_.probs[i];
    }
    for (auto& p : dirs_.probs) p /= total;
  }
  // Lévy integrability ∫(r² ∧ 1) q(r) dr < ∞.
  const double integ = radial_moment(2.0, 0.0, 1.0) + radial_moment(0.0, 1.0, kInf);
  if (!std::isfinite(integ)) {
    throw ConfigError(kind_ + ": radial density is not a Lévy measure (∫(r²∧1)q = ∞)");
  }
  if (isotropic_unbounded_power_law()) {
    const double a = alpha_;
    const double base = std::abs(a - 1.0) < 1e-12 ? -std::numbers::pi / 2.0
                                                  : std::tgamma(-a) * std::cos(std::numbers::pi * a / 2.0);
    stable_constant_ = segments_[0].coef * base * sphere_abs_moment(dim_, a);
  }
}

RadialDensity RadialDensity::power_law(Eigen::Index d, double c, double alpha, double r_max,
                                       Directions dirs) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("power_law: alpha must lie in (0, 2)");
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("power_law: c must be positive");
  if (!(r_max > 0.0)) throw ConfigError("power_law: r_max must be positive");
  return RadialDensity("power_law", d, {{c, -1.0 - alpha, 0.0, r_max}}, std::move(dirs), alpha);
}

RadialDensity RadialDensity::tabulated(Eigen::Index d, std::vector<double> knots,
                                       std::vector<double> values, Directions dirs) {
  if (knots.size() < 2 || knots.size() != values.size()) {
    throw ConfigError("tabulated: need at least two knots with matching values");
  }
  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i] > 0.0) || !(knots[i + 1] > knots[i])) {
      throw ConfigError("tabulated: knots must be positive and strictly increasing");
    }
    if (!(values[i] > 0.0) || !(values[i + 1] > 0.0)) {
      throw ConfigError("tabulated: values must be positive");
    }
    const double p = std::log(values[i + 1] / values[i]) / std::log(knots[i + 1] / knots[i]);
    segs.push_back({values[i] / std::pow(knots[i], p), p, knots[i], knots[i + 1]});
  }
  return RadialDensity("tabulated", d, std::move(segs), std::move(dirs),
                       std::numeric_limits<double>::quiet_NaN());
}

bool RadialDensity::isotropic_unbounded_power_law() const {
  return dirs_.uniform && segments_.size() == 1 && segments_[0].r_lo == 0.0 &&
         std::isinf(segments_[0].r_hi) && !std::isnan(alpha_);
}

double RadialDensity::radial_moment(double k, double lo, double hi) const {
  double s = 0.0;
  for (const auto& seg : segments_) {
    const double a = std::max(lo, seg.r_lo);
    const double b = std::min(hi, seg.r_hi);
    if (b > a) s += seg.coef * power_integral(seg.p + k, a, b);
  }
  return s;
}

bool RadialDensity::infinite_mass() const {
  for (const auto& seg : segments_) {
    if (seg.r_lo == 0.0 && seg.p <= -1.0) return true;
  }
  return false;
}

double RadialDensity::mass_above(double eps) const { return radial_moment(0.0, eps, kInf); }

double RadialDensity::clipped_second_moment(double eps) const {
  return eps * eps * mass_above(eps) + radial_moment(2.0, 0.0, eps);
}

double RadialDensity::small_ball_second_moment(double eps) const {
  return radial_moment(2.0, 0.0, eps);
}

double RadialDensity::direction_average(const Vector& l,
                                        const std::function<double(double)>& f) const {
  if (!dirs_.uniform) {
    double s = 0.0;
    for (std::size_t i = 0; i < dirs_.vectors.size(); ++i) {
      s += dirs_.probs[i] * f(dirs_.vectors[i].dot(l));
    }
    return s;
  }
  if (dim_ == 1) return 0.5 * (f(l(0)) + f(-l(0)));
  // (θ, l) = cos φ with density ∝ sin^{d-2} φ on [0, π].
  const double dd = static_cast<double>(dim_);
  const double norm = std::sqrt(std::numbers::pi) * std::exp(std::lgamma((dd - 1.0) / 2.0) -
                                                             std::lgamma(dd / 2.0));
  const double val = gauss_panels<8>(
      [&](double phi) { return f(std::cos(phi)) * std::pow(std::sin(phi), dd - 2.0); }, 0.0,
      std::numbers::pi, 128);
  return val / norm;
}

double RadialDensity::directional_truncated_moment(const Vector& l, double eps) const {
  require_unit(l, "directional_truncated_moment");
  if (isotropic_unbounded_power_law()) {
    const auto& s = segments_[0];
    return s.coef * std::pow(eps, 2.0 - alpha_) / (2.0 - alpha_) *
           sphere_abs_moment(dim_, alpha_);
  }
  return direction_average(l, [&](double c) {
    if (c == 0.0) return 0.0;
    return c * c * radial_moment(2.0, 0.0, eps / std::abs(c));
  });
}

double RadialDensity::moment_above_one(int n) const {
  return radial_moment(static_cast<double>(n), 1.0, kInf);
}

Vector RadialDensity::compensator_mean(double lo, double hi) const {
  if (dirs_.uniform) return Vector::Zero(dim_);
  Vector mean = Vector::Zero(dim_);
  for (std::size_t i = 0; i < dirs_.vectors.size(); ++i) mean += dirs_.probs[i] * dirs_.vectors[i];
  return radial_moment(1.0, lo, hi) * mean;
}

Matrix RadialDensity::small_jump_covariance(double eps) const {
  Matrix second = Matrix::Zero(dim_, dim_);
  if (dirs_.uniform) {
    second = Matrix::Identity(dim_, dim_) / static_cast<double>(dim_);
  } else {
    for (std::size_t i = 0; i < dirs_.vectors.size(); ++i) {
      second += dirs_.probs[i] * dirs_.vectors[i] * dirs_.vectors[i].transpose();
    }
  }
  return radial_moment(2.0, 0.0, eps) * second;
}

Subspace RadialDensity::tail_span(int, double tol) const {
  if (!infinite_mass()) return Subspace(dim_);
  if (dirs_.uniform) return Subspace(dim_, Matrix::Identity(dim_, dim_));
  return span_of(dirs_.vectors, dim_, tol);
}

double RadialDensity::scaled_clipped_moment(double log_eps) const {
  const double eps = std::exp(log_eps);
  if (eps == 0.0 || !std::isfinite(1.0 / (eps * eps))) {
    if (infinite_mass()) return kInf;
    return radial_moment(0.0, 0.0, kInf);
  }
  return mass_above(eps) + radial_moment(2.0, 0.0, eps) / (eps * eps);
}

double RadialDensity::scaled_small_ball_moment(double log_eps) const {
  const double eps = std::exp(log_eps);
  if (eps == 0.0 || !std::isfinite(1.0 / (eps * eps))) {
    // Only segments reaching the origin contribute; they behave like ε^{-α}.
    for (const auto& seg : segments_) {
      if (seg.r_lo == 0.0 && seg.p < -1.0) return kInf;
    }
    return 0.0;
  }
  return radial_moment(2.0, 0.0, eps) / (eps * eps);
}

Complex RadialDensity::radial_oscillatory(double c, double k, int k0, double cut) const {
  // Σ_seg coef ∫ r^{p+k} [e^{irc} − Σ_{j<k0}(irc)^j/j! · 1{r≤cut}] dr, with the
  // subtraction switched off above `cut`.
  if (c == 0.0) {
    // Integrand reduces to 1 − 1{k0≥1, r≤cut}.
    return k0 >= 1 ? radial_moment(k, cut, kInf) : radial_moment(k, 0.0, kInf);
  }
  const double ac = std::abs(c);
  Complex total{};
  for (const auto& seg : segments_) {
    const double q = seg.p + k;
    const double scale = seg.coef * std::pow(ac, -q - 1.0);
    const double a = seg.r_lo;
    const double b = seg.r_hi;
    Complex part{};
    if (a < cut) {
      const double hi = std::min(b, cut);
      part += osc_power_integral(q, a * ac, hi * ac, k0);
    }
    if (b > cut) {
      const double lo = std::max(a, cut);
      part += osc_power_integral(q, lo * ac, std::isinf(b) ? kInf : b * ac, 0);
    }
    total += scale * part;
  }
  return c > 0.0 ? total : std::conj(total);
}

Complex RadialDensity::exponent_integrand(const Vector& v, int) const {
  const double nv = v.norm();
  if (nv == 0.0) return {};
  if (isotropic_unbounded_power_law()) return {stable_constant_ * std::pow(nv, alpha_), 0.0};
  // J(c) = ∫ q(r)[e^{irc} − 1 − irc·1{r≤1}] dr; the constant term is
  // subtracted everywhere, the linear one only for r ≤ 1.
  auto jump = [&](double c) -> Complex {
    if (c == 0.0) return {};
    const double ac = std::abs(c);
    Complex total{};
    for (const auto& seg : segments_) {
      const double q = seg.p;
      const double scale = seg.coef * std::pow(ac, -q - 1.0);
      Complex part{};
      if (seg.r_lo < 1.0) {
        part += osc_power_integral(q, seg.r_lo * ac, std::min(seg.r_hi, 1.0) * ac, 2);
      }
      if (seg.r_hi > 1.0) {
        const double lo = std::max(seg.r_lo, 1.0);
        part += osc_power_integral(q, lo * ac, std::isinf(seg.r_hi) ? kInf : seg.r_hi * ac, 1);
      }
      total += scale * part;
    }
    return c > 0.0 ? total : std::conj(total);
  };
  if (!dirs_.uniform) {
    Complex s{};
    for (std::size_t i = 0; i < dirs_.vectors.size(); ++i) {
      s += dirs_.probs[i] * jump(dirs_.vectors[i].dot(v));
    }
    return s;
  }
  const Vector l = v / nv;
  return {direction_average(l, [&](double c) { return jump(nv * c).real(); }), 0.0};
}

Complex RadialDensity::derivative_integrand(const Vector& v, const std::vector<Vector>& dirs,
                                            int) const {
  const int r = static_cast<int>(dirs.size());
  const int k0 = (r == 1) ? 1 : 0;
  auto term = [&](const Vector& theta) {
    const double proj = product_of_projections(theta, dirs);
    if (proj == 0.0) return Complex{};
    return proj * radial_oscillatory(theta.dot(v), static_cast<double>(r), k0, 1.0);
  };
  Complex s{};
  if (!dirs_.uniform) {
    for (std::size_t i = 0; i < dirs_.vectors.size(); ++i) s += dirs_.probs[i] * term(dirs_.vectors[i]);
  } else {
    const SphereRule& rule = sphere_rule(dim_);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * term(rule.nodes[i]);
  }
  return ipow(r) * s;
}

double RadialDensity::support_radius() const {
  double r = 0.0;
  for (const auto& seg : segments_) r = std::max(r, seg.r_hi);
  return r;
}

Vector RadialDensity::draw_above(double eps, const UniformSource& u01) const {
  std::vector<double> masses;
  double total = 0.0;
  for (const auto& seg : segments_) {
    const double a = std::max(eps, seg.r_lo);
    const double m = seg.r_hi > a ? seg.coef * power_integral(seg.p, a, seg.r_hi) : 0.0;
    masses.push_back(m);
    total += m;
  }
  if (!(total > 0.0)) throw DomainError("draw_above: no mass above the cutoff");
  double pick = u01() * total;
  std::size_t idx = 0;
  while (idx + 1 < masses.size() && pick > masses[idx]) {
    pick -= masses[idx];
    ++idx;
  }
  const auto& seg = segments_[idx];
  const double a = std::max(eps, seg.r_lo);
  const double b = seg.r_hi;
  const double u = u01();
  double radius;
  if (seg.p == -1.0) {
    radius = a * std::pow(b / a, u);
  } else {
    const double e = seg.p + 1.0;
    const double fa = std::pow(a, e);
    const double fb = std::isinf(b) ? 0.0 : std::pow(b, e);
    radius = std::pow(fa + u * (fb - fa), 1.0 / e);
  }
  radius = std::clamp(radius, a, b);

  Vector theta(dim_);
  if (dirs_.uniform) {
    if (dim_ == 1) {
      theta(0) = u01() < 0.5 ? -1.0 : 1.0;
    } else {
      do {
        for (Eigen::Index i = 0; i < dim_; i += 2) {
          const double r = std::sqrt(-2.0 * std::log(u01()));
          const double ang = 2.0 * std::numbers::pi * u01();
          theta(i) = r * std::cos(ang);
          if (i + 1 < dim_) theta(i + 1) = r * std::sin(ang);
        }
      } while (theta.norm() == 0.0);
      theta.normalize();
    }
  } else {
    double p = u01();
    std::size_t j = 0;
    while (j + 1 < dirs_.probs.size() && p > dirs_.probs[j]) {
      p -= dirs_.probs[j];
      ++j;
    }
    theta = dirs_.vectors[j];
  }
  return radius * theta;
}

// ------------------------------------------------------------------ measure

LevyMeasure::LevyMeasure(Eigen::Index d, int n_max) : dim_(d), n_max_(n_max) {
  if (d < 1) throw DimensionError("LevyMeasure: dimension must be positive");
  if (n_max < 1) throw ConfigError("LevyMeasure: truncation depth must be positive");
}

LevyMeasure& LevyMeasure::add(std::shared_ptr<const MeasureComponent> component) {
  if (component->dim() != dim_) {
    throw DimensionError("LevyMeasure: component '" + component->kind() + "' has dimension " +
                         std::to_string(component->dim()) + ", measure has " +
                         std::to_string(dim_));
  }
  components_.push_back(std::move(component));
  return *this;
}

bool LevyMeasure::infinite_mass() const {
  return std::any_of(components_.begin(), components_.end(),
                     [](const auto& c) { return c->infinite_mass(); });
}

double LevyMeasure::total_mass() const {
  if (infinite_mass()) return kInf;
  double m = 0.0;
  for (const auto& c : components_) m += c->mass_above(0.0);
  return m;
}

LevyMeasure LevyMeasure::subset(const std::vector<std::size_t>& indices) const {
  LevyMeasure out(dim_, n_max_);
  for (auto i : indices) out.add(components_.at(i));
  return out;
}

bool LevyMeasure::has_factorial_family() const {
  return std::any_of(components_.begin(), components_.end(),
                     [](const auto& c) { return c->has_factorial_scales(); });
}

namespace {

void require_positive_eps(double eps, const char* what) {
  if (!(eps > 0.0)) throw DomainError(std::string(what) + ": epsilon must be positive");
}

void require_1d(const LevyMeasure& pi, const char* what) {
  if (pi.dim() != 1) {
    throw DomainError(std::string(what) + ": defined for d = 1 (use the directional form)");
  }
}

}  // namespace

double mass_above(const LevyMeasure& pi, double eps) {
  require_positive_eps(eps, "mass_above");
  double m = 0.0;
  for (const auto& c : pi.components()) m += c->mass_above(eps);
  return m;
}

double truncated_second_moment(const LevyMeasure& pi, double eps) {
  require_positive_eps(eps, "truncated_second_moment");
  require_1d(pi, "truncated_second_moment");
  double s = 0.0;
  for (const auto& c : pi.components()) s += c->clipped_second_moment(eps);
  return s;
}

double small_ball_second_moment(const LevyMeasure& pi, double eps) {
  require_positive_eps(eps, "small_ball_second_moment");
  double s = 0.0;
  for (const auto& c : pi.components()) s += c->small_ball_second_moment(eps);
  return s;
}

double rho(const LevyMeasure& pi, double eps) {
  require_positive_eps(eps, "rho");
  if (!(eps < 1.0)) throw DomainError("rho: epsilon must be below 1");
  return truncated_second_moment(pi, eps) / (eps * eps * std::log(1.0 / eps));
}

double rho_log(const LevyMeasure& pi, double log_eps) {
  require_1d(pi, "rho");
  if (!(log_eps < 0.0)) throw DomainError("rho: epsilon must be below 1");
  double s = 0.0;
  for (const auto& c : pi.components()) s += c->scaled_clipped_moment(log_eps);
  return s / -log_eps;
}

double kallenberg_ratio_log(const LevyMeasure& pi, double log_eps) {
  require_1d(pi, "kallenberg ratio");
  if (!(log_eps < 0.0)) throw DomainError("kallenberg ratio: epsilon must be below 1");
  double s = 0.0;
  for (const auto& c : pi.components()) s += c->scaled_small_ball_moment(log_eps);
  return s / -log_eps;
}

double directional_truncated_moment(const LevyMeasure& pi, const Vector& l, double eps) {
  require_positive_eps(eps, "directional_truncated_moment");
  if (l.size() != pi.dim()) throw DimensionError("directional_truncated_moment: l dimension");
  require_unit(l, "directional_truncated_moment");
  double s = 0.0;
  for (const auto& c : pi.components()) s += c->directional_truncated_moment(l, eps);
  return s;
}

double moment_above_one(const LevyMeasure& pi, int n) {
  if (n < 1) throw DomainError("moment_above_one: order must be >= 1");
  double s = 0.0;
  for (const auto& c : pi.components()) s += c->moment_above_one(n);
  return s;
}

double second_moment_below_one(const LevyMeasure& pi) {
  return small_ball_second_moment(pi, 1.0);
}

Vector compensator_mean(const LevyMeasure& pi, double lo, double hi) {
  if (!(lo >= 0.0) || !(lo < hi)) throw DomainError("compensator_mean: need 0 <= lo < hi");
  Vector s = Vector::Zero(pi.dim());
  for (const auto& c : pi.components()) s += c->compensator_mean(lo, hi);
  return s;
}

Matrix small_jump_covariance(const LevyMeasure& pi, double eps) {
  Matrix s = Matrix::Zero(pi.dim(), pi.dim());
  for (const auto& c : pi.components()) s += c->small_jump_covariance(eps);
  return s;
}

Subspace essential_linear_support(const LevyMeasure& pi, std::optional<double> tol) {
  Subspace acc(pi.dim());
  const double t = tol.value_or(default_rank_tol(pi.dim(), pi.n_max()));
  for (const auto& c : pi.components()) {
    if (!c->infinite_mass()) continue;
    acc = join(acc, c->tail_span(pi.n_max(), t), tol);
  }
  return acc;
}

YamazatoResult yamazato_check(const LevyMeasure& pi, std::optional<double> tol) {
  Subspace s = essential_linear_support(pi, tol);
  const bool holds = s.is_full();
  return {holds, std::move(s)};
}

// ----------------------------------------------------------- classification

std::string to_string(LimitClass c) {
  switch (c) {
    case LimitClass::diverges: return "diverges";
    case LimitClass::vanishes: return "vanishes";
    case LimitClass::bounded: return "bounded";
    default: return "undecided";
  }
}

LimitClass limit_class_from_string(const std::string& s) {
  if (s == "diverges") return LimitClass::diverges;
  if (s == "vanishes") return LimitClass::vanishes;
  if (s == "bounded") return LimitClass::bounded;
  if (s == "undecided") return LimitClass::undecided;
  throw ConfigError("unknown limit class '" + s + "'");
}

void classify_profile(GrowthProfile& profile, const LimitThresholds& th) {
  const auto& v = profile.values;
  const auto& x = profile.log_inv_eps;
  profile.cls = LimitClass::undecided;
  profile.slope = 0.0;
  if (v.size() < static_cast<std::size_t>(th.tail) || th.tail < 2) return;
  const std::size_t start = v.size() - static_cast<std::size_t>(th.tail);

  // Slope over the tail, skipping non-positive or infinite values.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = start; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i]) || !(x[i] > 1.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(v[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++n;
  }
  if (n >= 2 && n * sxx - sx * sx > 0.0) profile.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  auto nondecreasing = [&] {
    for (std::size_t i = start + 1; i < v.size(); ++i) {
      if (!(v[i] >= v[i - 1] || std::abs(v[i] - v[i - 1]) <= 1e-12 * std::abs(v[i - 1]))) {
        return false;
      }
    }
    return true;
  };
  auto nonincreasing = [&] {
    for (std::size_t i = start + 1; i < v.size(); ++i) {
      if (!(v[i] <= v[i - 1] || std::abs(v[i] - v[i - 1]) <= 1e-12 * std::abs(v[i - 1]))) {
        return false;
      }
    }
    return true;
  };
  const double lo = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(start), v.end());
  const double hi = *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(start), v.end());
  if (lo > th.diverge_min && nondecreasing()) {
    profile.cls = LimitClass::diverges;
  } else if (hi < th.vanish_max && nonincreasing()) {
    profile.cls = LimitClass::vanishes;
  } else if (lo >= th.vanish_max && hi <= th.diverge_min && std::abs(profile.slope) < th.bounded_slope) {
    profile.cls = LimitClass::bounded;
  }
}

GrowthProfile dyadic_profile(const std::function<double(double)>& f, const LimitThresholds& th) {
  GrowthProfile p;
  p.grid = "dyadic";
  for (int j = 4; j <= 40; ++j) {
    const double le = -j * std::numbers::ln2;
    p.log_inv_eps.push_back(-le);
    p.values.push_back(f(le));
  }
  classify_profile(p, th);
  return p;
}

GrowthProfile factorial_envelope_profile(const LevyMeasure& pi,
                                         const std::function<double(double)>& f,
                                         const LimitThresholds& th) {
  GrowthProfile p;
  p.grid = "none";
  std::vector<long> grid;
  for (long n = 5; n <= 60; ++n) grid.push_back(n);
  for (double n = 60.0 * 1.15; n <= 1e6; n *= 1.15) grid.push_back(static_cast<long>(n));

  std::vector<std::pair<double, double>> rows;  // (log 1/ε, envelope value)
  for (const auto& c : pi.components()) {
    if (!c->has_factorial_scales()) continue;
    for (long n : grid) {
      const double s_hi = c->log_atom_norm(n);
      const double s_lo = c->log_atom_norm(n + 1);
      double env = kInf;
      for (int k = 1; k <= 8; ++k) {
        const double le = s_lo + k / 8.0 * (s_hi - s_lo);
        if (!(le < 0.0)) continue;
        env = std::min(env, f(le));
      }
      if (std::isfinite(-s_lo)) rows.emplace_back(-s_lo, env);
    }
  }
  if (rows.empty()) return p;
  std::sort(rows.begin(), rows.end());
  p.grid = "factorial";
  for (const auto& [x, v] : rows) {
    p.log_inv_eps.push_back(x);
    p.values.push_back(v);
  }
  classify_profile(p, th);
  return p;
}

}  // namespace levyou
