#include "levyou/charfn.hpp"

#include "levyou/errors.hpp"
#include "levyou/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace levyou {

namespace {

constexpr int kCachedPanels = 4096;

Complex ipow(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// Largest radius at which a component's integrand still oscillates
/// with (u, v); 0 for the closed-form stable exponent.
double oscillation_radius(const MeasureComponent& c) {
  if (c.is_atomic()) return c.support_radius();
  const auto& r = dynamic_cast<const RadialDensity&>(c);
  if (r.isotropic_unbounded_power_law()) return 0.0;
  double out = 0.0;
  for (const auto& s : r.segments()) {
    if (std::isfinite(s.r_hi)) out = std::max(out, s.r_hi);
    out = std::max(out, s.r_lo);
  }
  return out;
}

}  // namespace

ExponentEvaluator::ExponentEvaluator(const OUModel& model, double t, QuadratureOptions opt)
    : model_(model), t_(t), opt_(opt) {
  if (!(t > 0.0)) throw DomainError("characteristic exponent: t must be positive");
  validate(model_);
  sigma_ = levyou::gaussian_covariance(model_, t_);
  shift_ = deterministic_part(model_, t_);
  scalar_closed_form_ = model_.m == 1;
  bool has_density = false;
  for (const auto& c : model_.measure.components()) has_density = has_density || !c->is_atomic();
  kink_sensitive_ = model_.d == 1 && model_.m >= 2 && has_density;
  if (kink_sensitive_) {
    const int k = std::clamp(static_cast<int>(std::ceil(64.0 * t_ * op_norm(model_.A))), 256, 1 << 16);
    table_step_ = t_ / k;
    for (int i = 0; i <= k; ++i) table_.push_back(expm((i * table_step_) * model_.A));
    Matrix term = Matrix::Identity(model_.m, model_.m);
    for (int j = 0; j < 12; ++j) {
      taylor_.push_back(term);
      term = term * model_.A / static_cast<double>(j + 1);
    }
  }
}

Matrix ExponentEvaluator::map_at(double tau) const {
  const int last = static_cast<int>(table_.size()) - 2;
  const int k = std::clamp(static_cast<int>(tau / table_step_), 0, last);
  const double delta = tau - k * table_step_;
  Matrix e = taylor_.back();
  for (int j = static_cast<int>(taylor_.size()) - 2; j >= 0; --j) e = e * delta + taylor_[j];
  return e * table_[k] * model_.D;
}

std::vector<double> ExponentEvaluator::kinks(const Vector& z) const {
  std::vector<double> out;
  auto g = [&](double tau) { return (map_at(tau).transpose() * z)(0); };
  const int k = static_cast<int>(table_.size()) - 1;
  const double scale = z.norm() * op_norm(model_.D) * std::exp(t_ * op_norm(model_.A));
  const double tiny = 1e-13 * scale;
  double prev = (model_.D.transpose() * table_[0].transpose() * z)(0);
  if (std::abs(prev) <= tiny) out.push_back(0.0);
  for (int i = 1; i <= k; ++i) {
    const double cur = (model_.D.transpose() * table_[i].transpose() * z)(0);
    if (prev * cur < 0.0) {
      double lo = (i - 1) * table_step_, hi = i * table_step_;
      double glo = prev;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * t_; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
    } else if (std::abs(cur) <= tiny && i < k && (out.empty() || out.back() < (i - 1) * table_step_)) {
      out.push_back(i * table_step_);
    }
    prev = cur;
  }
  if (std::abs(prev) <= tiny && (out.empty() || out.back() < t_)) out.push_back(t_);
  return out;
}

Complex ExponentEvaluator::graded_integral(const Vector& z, const std::vector<int>& index,
                                           const std::vector<const MeasureComponent*>& comps,
                                           const std::vector<double>& kink_points) const {
  // Pieces between consecutive breakpoints; each is integrated in s ∈ [0, 1]
  // with τ = p ± L s⁴ graded toward its kink p, which smooths |·|^α corners.
  struct Piece {
    double anchor, length, sign;
  };
  std::vector<double> cuts{0.0};
  for (double k : kink_points) {
    if (k > cuts.back()) cuts.push_back(k);
  }
  if (cuts.back() < t_) cuts.push_back(t_);
  auto is_kink = [&](double x) {
    return std::find(kink_points.begin(), kink_points.end(), x) != kink_points.end();
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double a = cuts[i - 1], b = cuts[i];
    const bool left = is_kink(a), right = is_kink(b);
    if (left && right) {
      const double mid = 0.5 * (a + b);
      pieces.push_back({a, mid - a, 1.0});
      pieces.push_back({b, b - mid, -1.0});
    } else if (right) {
      pieces.push_back({b, b - a, -1.0});
    } else {
      pieces.push_back({a, b - a, 1.0});
    }
  }
  const int n_max = model_.measure.n_max();
  const double phase = phase_bound(z);
  Complex total{};
  for (const auto& pc : pieces) {
    auto evaluate = [&](int panels, double& absint) {
      std::vector<double> x, w;
      composite_nodes<16>(0.0, 1.0, panels, x, w);
      Complex sum{};
      absint = 0.0;
      std::vector<Vector> dirs(index.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double s2 = x[i] * x[i];
        const double tau = pc.anchor + pc.sign * pc.length * s2 * s2;
        const double jac = 4.0 * pc.length * s2 * x[i];
        const Matrix map = map_at(tau);
        const Vector v = map.transpose() * z;
        for (std::size_t l = 0; l < index.size(); ++l) dirs[l] = map.row(index[l]).transpose();
        Complex g{};
        for (const auto* c : comps) {
          g += index.empty() ? c->exponent_integrand(v, n_max) : c->derivative_integrand(v, dirs, n_max);
        }
        sum += w[i] * jac * g;
        absint += w[i] * jac * std::abs(g);
      }
      return sum;
    };
    int panels = std::clamp(static_cast<int>(std::ceil(32.0 * phase * pc.length / (t_ * std::numbers::pi))), 2,
                            opt_.max_panels / 2);
    double absint = 0.0;
    Complex prev = evaluate(panels, absint);
    while (true) {
      panels *= 2;
      const Complex cur = evaluate(panels, absint);
      const double change = std::abs(cur - prev);
      if (change <= opt_.rel_tol * std::abs(cur) + opt_.abs_tol * absint) {
        total += cur;
        break;
      }
      if (panels >= opt_.max_panels) {
        throw AccuracyError("characteristic exponent: graded s-quadrature did not converge", change);
      }
      prev = cur;
    }
  }
  return total;
}

const ExponentEvaluator::Level& ExponentEvaluator::level(int panels) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = levels_.find(panels);
  if (it != levels_.end()) return *it->second;
  auto lv = std::make_unique<Level>();
  std::vector<double> x;
  composite_nodes<16>(0.0, t_, panels, x, lv->weights);
  lv->maps.reserve(x.size());
  for (double tau : x) lv->maps.push_back(expm(tau * model_.A) * model_.D);
  const Level& ref = *lv;
  if (panels <= kCachedPanels) levels_.emplace(panels, std::move(lv));
  else levels_[-1] = std::move(lv);  // keep only the latest oversized level alive
  return ref;
}

double ExponentEvaluator::phase_bound(const Vector& z) const {
  double radius = 0.0;
  for (const auto& c : model_.measure.components()) {
    if (scalar_closed_form_ && c->is_atomic()) continue;
    radius = std::max(radius, oscillation_radius(*c));
  }
  const double na = op_norm(model_.A);
  const double growth = na > 0.0 ? std::expm1(t_ * na) : 0.0;
  return radius * op_norm(model_.D) * z.norm() * growth;
}

Complex ExponentEvaluator::scalar_atoms(const Vector& z, int r) const {
  // m = 1: (u, e^{τA}D…) scales as e^{aτ}; substitute y = c e^{aτ}.
  const double a = model_.A(0, 0);
  const double zz = z(0);
  const Vector drow = model_.D.row(0).transpose();
  Complex total{};
  for (const auto& comp : model_.measure.components()) {
    if (!comp->is_atomic()) continue;
    for (const auto& atom : comp->atoms(model_.measure.n_max())) {
      const double p = drow.dot(atom.point);
      if (p == 0.0) continue;
      const bool compensated = atom.point.norm() <= 1.0;
      const double c = p * zz;
      if (r == 0) {
        if (c == 0.0) continue;
        Complex val;
        if (a == 0.0) {
          const double s = std::sin(0.5 * c);
          val = t_ * Complex(-2.0 * s * s, std::sin(c) - (compensated ? c : 0.0));
        } else {
          const double ac = std::abs(c);
          const double e = std::exp(a * t_);
          val = osc_power_integral(-1.0, ac * std::min(1.0, e), ac * std::max(1.0, e),
                                   compensated ? 2 : 1) /
                std::abs(a);
          if (c < 0.0) val = std::conj(val);
        }
        total += atom.weight * val;
        continue;
      }
      const bool subtract = r == 1 && compensated;
      Complex val;
      if (a == 0.0 || c == 0.0) {
        // Integrand i^r p^r e^{raτ}[e^{ic e^{aτ}} − 1{subtract}] with constant phase
        // when a = 0, or c = 0 (then z = 0 and e^{i·0} = 1).
        const Complex e = std::polar(1.0, c) - (subtract ? 1.0 : 0.0);
        const double time = a == 0.0 ? t_ : std::expm1(r * a * t_) / (r * a);
        val = ipow(r) * std::pow(p, r) * e * time;
      } else {
        const double ac = std::abs(c);
        const double e = std::exp(a * t_);
        Complex integral = osc_power_integral(r - 1.0, ac * std::min(1.0, e), ac * std::max(1.0, e),
                                              subtract ? 1 : 0) /
                           std::abs(a);
        if (c < 0.0) integral = (r % 2 == 0 ? 1.0 : -1.0) * std::conj(integral);
        val = ipow(r) * std::pow(zz, -r) * integral;
      }
      total += atom.weight * val;
    }
  }
  return total;
}

Complex ExponentEvaluator::jump_integral(const Vector& z, const std::vector<int>& index,
                                         bool closed_form) const {
  const auto& comps = model_.measure.components();
  std::vector<const MeasureComponent*> quad;
  for (const auto& c : comps) {
    if (closed_form && c->is_atomic()) continue;
    quad.push_back(c.get());
  }
  Complex closed{};
  if (closed_form) closed = scalar_atoms(z, static_cast<int>(index.size()));
  if (quad.empty()) return closed;
  if (kink_sensitive_) {
    const std::vector<double> ks = kinks(z);
    if (!ks.empty()) return closed + graded_integral(z, index, quad, ks);
  }

  const int n_max = model_.measure.n_max();
  auto evaluate = [&](int panels, double& absint) {
    const Level& lv = level(panels);
    Complex sum{};
    absint = 0.0;
    std::vector<Vector> dirs(index.size());
    for (std::size_t i = 0; i < lv.weights.size(); ++i) {
      const Matrix& map = lv.maps[i];  // e^{τA} D, m x d
      const Vector v = map.transpose() * z;
      for (std::size_t l = 0; l < index.size(); ++l) dirs[l] = map.row(index[l]).transpose();
      Complex g{};
      for (const auto* c : quad) {
        g += index.empty() ? c->exponent_integrand(v, n_max) : c->derivative_integrand(v, dirs, n_max);
      }
      sum += lv.weights[i] * g;
      absint += lv.weights[i] * std::abs(g);
    }
    return sum;
  };

  const double phase = phase_bound(z);
  int panels = std::clamp(static_cast<int>(std::ceil(8.0 * phase / std::numbers::pi)), 2,
                          opt_.max_panels / 2);
  double absint = 0.0;
  Complex prev = evaluate(panels, absint);
  while (true) {
    panels *= 2;
    Complex cur = evaluate(panels, absint);
    const double change = std::abs(cur - prev);
    if (change <= opt_.rel_tol * std::abs(cur) + opt_.abs_tol * absint) return closed + cur;
    if (panels >= opt_.max_panels) {
      throw AccuracyError("characteristic exponent: s-quadrature did not converge", change);
    }
    prev = cur;
  }
}

Complex ExponentEvaluator::psi(const Vector& z) const {
  if (z.size() != model_.m) throw DimensionError("psi: z must have length m");
  if (z.isZero()) return {};
  const double gauss = -0.5 * z.dot(sigma_ * z);
  return gauss + jump_integral(z, {}, scalar_closed_form_);
}

Complex ExponentEvaluator::charfn(const Vector& z) const {
  if (z.size() != model_.m) throw DimensionError("charfn: z must have length m");
  return std::exp(psi(z) + Complex(0.0, shift_.dot(z)));
}

CVector ExponentEvaluator::gradient(const Vector& z) const {
  CVector g(model_.m);
  for (int j = 0; j < model_.m; ++j) g(j) = derivative(z, {j});
  return g;
}

Complex ExponentEvaluator::derivative(const Vector& z, const std::vector<int>& index) const {
  if (z.size() != model_.m) throw DimensionError("psi derivative: z must have length m");
  if (index.empty()) throw DomainError("psi derivative: order must be >= 1");
  for (int j : index) {
    if (j < 0 || j >= model_.m) throw DimensionError("psi derivative: index out of range");
  }
  Complex gauss{};
  if (index.size() == 1) gauss = -(sigma_.row(index[0]).dot(z));
  if (index.size() == 2) gauss = -sigma_(index[0], index[1]);
  // The substitution divides by z, so z = 0 goes through quadrature.
  return gauss + jump_integral(z, index, scalar_closed_form_ && !z.isZero());
}

Complex psi(const OUModel& model, double t, const Vector& z) {
  return ExponentEvaluator(model, t).psi(z);
}
Complex charfn(const OUModel& model, double t, const Vector& z) {
  return ExponentEvaluator(model, t).charfn(z);
}
CVector psi_gradient(const OUModel& model, double t, const Vector& z) {
  return ExponentEvaluator(model, t).gradient(z);
}
Complex psi_derivative(const OUModel& model, double t, const Vector& z, const std::vector<int>& index) {
  return ExponentEvaluator(model, t).derivative(z, index);
}

// ----------------------------------------------------------------- bounds

DerivativeBound derivative_bound(const OUModel& model, double t, int r) {
  if (r < 1) throw DomainError("derivative_bound: order must be >= 1");
  if (!(t > 0.0)) throw DomainError("derivative_bound: t must be positive");
  const LevyMeasure& pi = model.measure;
  const double K = std::exp(t * op_norm(model.A));
  const double nb = model.B.size() > 0 ? op_norm(model.B) : 0.0;
  const double nd = op_norm(model.D);
  const double small = pi.is_zero() ? 0.0 : second_moment_below_one(pi);
  auto jump = [&](double factor, double moment) {
    if (nd == 0.0 || factor == 0.0) return 0.0;
    return factor * moment;
  };
  DerivativeBound b;
  b.r = r;
  if (r == 1) {
    b.slope = t * K * K * (nb * nb + nd * nd * small);
    b.value = jump(t * K * nd, moment_above_one(pi, 1));
  } else if (r == 2) {
    b.value = t * K * K * nb * nb + jump(t * K * K * nd * nd, small + moment_above_one(pi, 2));
  } else {
    b.value = jump(t * std::pow(K * nd, r), small + moment_above_one(pi, r));
  }
  b.infinite = std::isinf(b.value) || std::isinf(b.slope);
  return b;
}

double sinc_sup_beyond(double c) {
  c = std::abs(c);
  if (c == 0.0) return 1.0;
  // First side lobe of |sin y / y|, attained at the root of tan y = y in (π, 3π/2).
  constexpr double kFirstLobe = 0.21723362821122166;
  if (c < std::numbers::pi) return std::max(std::sin(c) / c, kFirstLobe);
  // |sin y/y| ≤ 1/y, so the supremum lies within one period of c.
  auto f = [](double y) { return std::abs(std::sin(y) / y); };
  double best = f(c);
  double arg = c;
  const int n = 20000;
  for (int i = 1; i <= n; ++i) {
    const double y = c + std::numbers::pi * i / n;
    if (f(y) > best) {
      best = f(y);
      arg = y;
    }
  }
  double lo = std::max(c, arg - std::numbers::pi / n);
  double hi = arg + std::numbers::pi / n;
  for (int i = 0; i < 100; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) lo = m1; else hi = m2;
  }
  return std::max(best, f(0.5 * (lo + hi)));
}

ScalarDecayConstants theorem1_constants(double A, double t) {
  if (!(A > 0.0)) throw DomainError("scalar decay constants: require A > 0");
  if (!(t > 0.0)) throw DomainError("scalar decay constants: require t > 0");
  ScalarDecayConstants k;
  k.t = t;
  k.A = A;
  k.beta = std::exp(-A * t);
  k.C = 1.0 - std::cos(1.0);
  k.C1 = k.C * std::expm1(2.0 * t * A) / (2.0 * A);
  k.gamma = sinc_sup_beyond(std::expm1(t * A) * k.beta / 2.0);
  k.C2 = (1.0 - k.gamma) * std::expm1(t * A) / A;
  k.C3 = std::min(k.C1 * k.beta * k.beta, k.C2);
  return k;
}

double theorem1_bound(const OUModel& model, double t, double z) {
  if (!(model.m == 1 && model.d == 1) || model.has_gaussian() || model.D(0, 0) != 1.0) {
    throw DomainError("scalar decay bound: requires dX = AX dt + dZ with m = d = 1");
  }
  const ScalarDecayConstants k = theorem1_constants(model.A(0, 0), t);
  const double az = std::abs(z);
  if (!(az > k.beta)) throw DomainError("scalar decay bound: requires |z| > e^{-At}");
  const double x = k.beta / az;
  return std::pow(x, k.C3 * rho(model.measure, x));
}

double phi_big(const LevyMeasure& pi, double r, const SphereSampling& s) {
  if (!(r > 0.0)) throw DomainError("Phi: r must be positive");
  return r * r * directional_infimum(pi, 1.0 / r, s).value;
}

DirectionalDiagnostic phi_growth_diagnostic(const LevyMeasure& pi, const SphereSampling& s,
                                            const LimitThresholds& th) {
  DirectionalDiagnostic out;
  out.profile.grid = "phi";
  Vector worst;
  for (int j = 4; j <= 48; ++j) {
    const double r = std::pow(10.0, j / 4.0);
    const SphereInfimum inf = directional_infimum(pi, 1.0 / r, s);
    worst = inf.direction;
    out.profile.log_inv_eps.push_back(std::log(r));
    out.profile.values.push_back(r * r * inf.value / std::log(r));
  }
  classify_profile(out.profile, th);
  out.cls = out.profile.cls;
  out.worst_direction = worst;
  return out;
}

Lemma1Estimate lemma1_gamma(const OUModel& model, double t, double alpha, double beta,
                            const SphereSampling& s) {
  if (!(alpha > 0.0 && beta > 0.0)) throw DomainError("lemma1_gamma: thresholds must be positive");
  if (!(t > 0.0)) throw DomainError("lemma1_gamma: t must be positive");
  Lemma1Estimate est;
  est.alpha = alpha;
  est.beta = beta;
  const int n = est.s_points;
  const double h = t / (n - 1);
  const Matrix step = expm(h * model.A.transpose());
  auto occupation = [&](const Vector& l) {
    Vector v = l;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double bn = model.B.size() > 0 ? (model.B.transpose() * v).norm() : 0.0;
      const double dn = (model.D.transpose() * v).norm();
      if (bn > alpha || dn > beta) total += (i == 0 || i == n - 1) ? 0.5 * h : h;
      v = step * v;
    }
    return total;
  };
  const int m = model.m;
  est.gamma = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& l) {
    ++est.directions;
    const double g = occupation(l);
    if (g < est.gamma) {
      est.gamma = g;
      est.worst_direction = l;
    }
  };
  if (m == 1) {
    consider(Vector::Constant(1, 1.0));
    return est;
  }
  std::mt19937_64 gen(s.seed ^ 0x5bd1e995ULL);
  std::normal_distribution<double> normal;
  auto random_unit = [&] {
    Vector v(m);
    do {
      for (int i = 0; i < m; ++i) v(i) = normal(gen);
    } while (v.norm() == 0.0);
    return Vector(v.normalized());
  };
  for (int i = 0; i < m; ++i) consider(Vector::Unit(m, i));
  for (int i = 0; i < s.samples; ++i) consider(random_unit());
  double radius = 0.1;
  for (int round = 0; round < s.refine_rounds; ++round) {
    const Vector centre = est.worst_direction;
    for (int i = 0; i < s.refine_draws; ++i) {
      Vector l = centre + radius * random_unit();
      if (l.norm() > 0.0) consider(l.normalized());
    }
    radius *= 0.3;
  }
  return est;
}

double theorem2_bound(const OUModel& model, const Vector& z, const Lemma1Estimate& est,
                      const SphereSampling& s) {
  if (z.size() != model.m) throw DimensionError("theorem2_bound: z must have length m");
  const double zn = z.norm();
  if (zn == 0.0 || est.gamma <= 0.0) return 1.0;
  const double C = 1.0 - std::cos(1.0);
  const double gauss = 0.5 * est.alpha * est.alpha * zn * zn;
  const double jumps = model.measure.is_zero() ? 0.0 : C * phi_big(model.measure, est.beta * zn, s);
  return std::exp(-est.gamma * std::min(gauss, jumps));
}

DecayScan phi_decay_scan(const OUModel& model, double t, int n_max, const std::vector<double>& radii,
                         int directions) {
  if (radii.empty()) throw DomainError("phi_decay_scan: empty radius list");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw DomainError("phi_decay_scan: radii must increase");
  }
  const ExponentEvaluator ev(model, t);
  const int m = model.m;
  std::vector<Vector> dirs;
  if (m == 1) {
    dirs = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  } else if (m == 2) {
    for (int k = 0; k < directions; ++k) {
      const double a = 2.0 * std::numbers::pi * k / directions;
      Vector v(2);
      v << std::cos(a), std::sin(a);
      dirs.push_back(v);
    }
  } else {
    std::mt19937_64 gen(0);
    std::normal_distribution<double> normal;
    for (int i = 0; i < m; ++i) dirs.push_back(Vector::Unit(m, i));
    while (static_cast<int>(dirs.size()) < directions) {
      Vector v(m);
      for (int i = 0; i < m; ++i) v(i) = normal(gen);
      if (v.norm() > 0.0) dirs.push_back(v.normalized());
    }
  }
  DecayScan out;
  out.radii = radii;
  out.n_max = n_max;
  for (double R : radii) {
    double sup = 0.0;
    for (const auto& d : dirs) sup = std::max(sup, std::abs(ev.charfn(R * d)));
    out.sup_modulus.push_back(sup);
  }
  for (int n = 0; n <= n_max; ++n) {
    std::vector<double> row;
    for (std::size_t i = 0; i < radii.size(); ++i) row.push_back(std::pow(radii[i], n) * out.sup_modulus[i]);
    bool ok = true;
    for (std::size_t i = std::max<std::size_t>(1, radii.size() / 2); i < row.size(); ++i) {
      if (!(row[i] < row[i - 1] || (row[i] == 0.0 && row[i - 1] == 0.0))) ok = false;
    }
    out.table.push_back(std::move(row));
    out.consistent.push_back(ok);
  }
  return out;
}

double singularity_witness(const LevyMeasure& pi, double t, int N) {
  if (N < 1) throw DomainError("singularity_witness: N must be >= 1");
  const FactorialFamily* fam = nullptr;
  if (pi.dim() == 1 && pi.components().size() == 1) {
    fam = dynamic_cast<const FactorialFamily*>(pi.components().front().get());
  }
  if (fam == nullptr || fam->shape() != FactorialFamily::Shape::radial) {
    throw UnsupportedError("singularity_witness: requires a single factorial family in d = 1");
  }
  // At z = 2πN!, atoms n ≤ N contribute whole turns; for n > N the phase is
  // 2π q_n with q_n = N!/n!, and each term is w_n (cos 2πq_n − 1).
  double q = 1.0;
  double sum = 0.0;
  for (long n = N + 1;; ++n) {
    q /= static_cast<double>(n);
    const double s = std::sin(std::numbers::pi * q);
    const double term = -2.0 * fam->weight().at(n) * s * s;
    sum += term;
    if (std::abs(term) < 1e-18 || q == 0.0) break;
  }
  return std::exp(t * sum);
}

}  // namespace levyou
