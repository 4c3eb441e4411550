#include "levyou/density.hpp"

#include "levyou/criteria.hpp"
#include "levyou/errors.hpp"
#include "levyou/json_io.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

namespace levyou {

namespace {

using PhiLine = std::function<Complex(double)>;

int next_pow2(double x) {
  int n = 1;
  while (n < x && n < (1 << 30)) n <<= 1;
  return n;
}

void parallel_for(long n, int threads, const std::function<void(long)>& body) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<long>(1, n / 256))));
  if (threads == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long i = n * w / threads; i < n * (w + 1) / threads; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_density(const OUModel& model, double t, bool force) {
  const RegularityReport rep = assemble_report(model, t);
  if (rep.density_exists.value == Tri::no) {
    throw RefusedError("density: X(t) has no density (" + rep.density_exists.rule + ")");
  }
  if (rep.density_smooth.value == Tri::no && !force) {
    throw RefusedError("density: the density is not smooth (" + rep.density_smooth.rule +
                       "); the characteristic function does not decay, pass --force to invert anyway");
  }
}

CutoffSearch line_cutoff(const PhiLine& phi, double floor, double cap) {
  CutoffSearch out;
  double r = 0.125;
  double mod = std::abs(phi(r));
  while (mod >= floor && r < cap) {
    r = std::min(2.0 * r, cap);
    mod = std::abs(phi(r));
  }
  if (mod >= floor) {
    out.radius = cap;
    out.modulus = mod;
    out.capped = true;
    return out;
  }
  double lo = r / 2.0, hi = r;
  if (r == 0.125) lo = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double m = std::abs(phi(mid));
    if (m < floor) {
      hi = mid;
      mod = m;
    } else {
      lo = mid;
    }
  }
  out.radius = hi;
  out.modulus = mod;
  return out;
}

/// First radius with |φ| ≤ e^{-1}: a scale for heavy-tailed laws.
double unit_scale_radius(const PhiLine& phi) {
  double r = 1e-3;
  while (std::abs(phi(r)) > std::exp(-1.0) && r < 1e6) r *= 1.5;
  return r;
}

void check_cap(const CutoffSearch& cut, std::vector<std::string>& warnings) {
  if (!cut.capped) return;
  if (cut.modulus > 1e-2) {
    throw AccuracyError("density: |phi| does not decay below 1e-2 before the frequency cap; inversion is meaningless",
                        cut.modulus);
  }
  warnings.push_back("heavy-tail phi: frequency cap reached with |phi| = " + std::to_string(cut.modulus));
}

void finish(DensityGrid& g, bool force) {
  double neg = 0.0;
  double sum = 0.0;
  g.min_raw = *std::min_element(g.values.begin(), g.values.end());
  for (double& v : g.values) {
    if (v < 0.0) {
      neg += -v;
      v = 0.0;
    }
    sum += v;
  }
  const double vol = g.cell_volume();
  g.clipped_mass = neg * vol;
  g.normalization = sum * vol;
  if (g.min_raw < -1e-6) {
    g.warnings.push_back("negative ringing down to " + std::to_string(g.min_raw) + " clipped");
  }
  if (std::abs(g.normalization - 1.0) > 1e-3) {
    if (!force) {
      throw AccuracyError("density: normalization off by more than 1e-3 after clipping",
                          std::abs(g.normalization - 1.0));
    }
    g.warnings.push_back("normalization " + std::to_string(g.normalization) + " outside 1 +- 1e-3");
  }
}

struct LineMoments {
  double mean = 0.0;
  std::optional<double> sd;
};

DensityGrid invert_line(const PhiLine& phi, const LineMoments& mom, double fallback_center,
                        const GridRequest& req, double lo_req, double hi_req, bool have_range) {
  DensityGrid g;
  g.dim = 1;
  const CutoffSearch cut = line_cutoff(phi, req.phi_floor, req.z_cap);
  check_cap(cut, g.warnings);
  g.tail_modulus = cut.modulus;
  g.z_max = {cut.radius};
  double lo = lo_req, hi = hi_req;
  if (!have_range) {
    if (mom.sd && *mom.sd > 0.0) {
      lo = mom.mean - 12.0 * *mom.sd;
      hi = mom.mean + 12.0 * *mom.sd;
    } else {
      const double half = 50.0 / unit_scale_radius(phi);
      lo = fallback_center - half;
      hi = fallback_center + half;
    }
  }
  if (!(hi > lo)) throw DomainError("density: empty x-range");
  const double L = hi - lo;
  const int n = next_pow2(std::max<double>(req.min_points, L * cut.radius / std::numbers::pi));
  if (n > req.max_points) {
    throw AccuracyError("density: grid would need " + std::to_string(n) + " points", static_cast<double>(n));
  }
  g.x_min = {lo};
  g.x_max = {hi};
  g.points = {n};
  const double dz = 2.0 * std::numbers::pi / L;
  std::vector<Complex> in(n), out;
  // φ(−z) = conj φ(z); sample z ≥ 0 and mirror.
  std::vector<Complex> half(n / 2 + 1);
  parallel_for(n / 2 + 1, req.threads, [&](long j) { half[j] = phi(j * dz); });
  for (int j = 0; j < n; ++j) {
    const int k = j - n / 2;
    const double z = k * dz;
    const Complex v = k >= 0 ? half[k] : std::conj(half[-k]);
    in[j] = v * std::polar(1.0, -z * lo);
  }
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  g.values.resize(n);
  for (int k = 0; k < n; ++k) {
    g.values[k] = (k % 2 == 0 ? 1.0 : -1.0) * (dz / (2.0 * std::numbers::pi)) * out[k].real();
  }
  return g;
}

LineMoments moments_along(const ExponentEvaluator& ev, const Vector& l) {
  LineMoments mom;
  const OUModel& model = ev.model();
  const Vector zero = Vector::Zero(model.m);
  const bool mean_ok = model.measure.is_zero() || std::isfinite(moment_above_one(model.measure, 1));
  const bool var_ok = model.measure.is_zero() || std::isfinite(moment_above_one(model.measure, 2));
  mom.mean = ev.shift().dot(l);
  if (mean_ok) {
    // ψ'(0) = i E[jump part].
    for (Eigen::Index j = 0; j < model.m; ++j) {
      if (l(j) != 0.0) mom.mean += l(j) * ev.derivative(zero, {static_cast<int>(j)}).imag();
    }
  }
  if (var_ok) {
    double var = 0.0;
    for (Eigen::Index i = 0; i < model.m; ++i) {
      for (Eigen::Index j = 0; j < model.m; ++j) {
        if (l(i) == 0.0 || l(j) == 0.0) continue;
        var -= l(i) * l(j) * ev.derivative(zero, {static_cast<int>(i), static_cast<int>(j)}).real();
      }
    }
    if (var > 0.0) mom.sd = std::sqrt(var);
  }
  return mom;
}

}  // namespace

GridRequest grid_request_from_json(const Json& j) {
  GridRequest r;
  if (j.is_null()) return r;
  if (!j.is_object()) throw ConfigError("density: expected an object");
  auto range = [&](const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    if (j[key].is_number()) out = {j[key].get<double>()};
    else out = j[key].get<std::vector<double>>();
  };
  range("x_min", r.x_min);
  range("x_max", r.x_max);
  if (r.x_min.size() != r.x_max.size()) throw ConfigError("density.x_min/x_max: lengths differ");
  if (j.contains("min_points")) r.min_points = j["min_points"].get<int>();
  if (j.contains("max_points")) r.max_points = j["max_points"].get<int>();
  if (j.contains("phi_floor")) r.phi_floor = j["phi_floor"].get<double>();
  if (j.contains("z_cap")) r.z_cap = j["z_cap"].get<double>();
  if (r.min_points < 2) throw ConfigError("density.min_points: must be >= 2");
  return r;
}

double DensityGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= step(a);
  return v;
}

double DensityGrid::at(const Vector& x) const {
  if (x.size() != dim) throw DimensionError("DensityGrid::at: wrong dimension");
  auto locate = [&](int axis, double xi, int& i, double& f) {
    const double s = (xi - x_min[axis]) / step(axis);
    if (s < 0.0 || s > points[axis] - 1) return false;
    i = std::min(static_cast<int>(s), points[axis] - 2);
    f = s - i;
    return true;
  };
  int i = 0, j = 0;
  double f = 0.0, h = 0.0;
  if (!locate(0, x(0), i, f)) return 0.0;
  if (dim == 1) return (1 - f) * values[i] + f * values[i + 1];
  if (!locate(1, x(1), j, h)) return 0.0;
  const int n1 = points[1];
  auto v = [&](int a, int b) { return values[static_cast<std::size_t>(a) * n1 + b]; };
  return (1 - f) * ((1 - h) * v(i, j) + h * v(i, j + 1)) + f * ((1 - h) * v(i + 1, j) + h * v(i + 1, j + 1));
}

Json metadata_to_json(const DensityGrid& g) {
  Json j;
  j["dimension"] = g.dim;
  j["x_min"] = g.x_min;
  j["x_max"] = g.x_max;
  j["points"] = g.points;
  j["z_max"] = g.z_max;
  j["tail_modulus"] = g.tail_modulus;
  j["normalization"] = g.normalization;
  j["normalization_residual"] = g.normalization - 1.0;
  j["clipped_mass"] = g.clipped_mass;
  j["min_raw_value"] = g.min_raw;
  j["warnings"] = g.warnings;
  return j;
}

CutoffSearch phi_cutoff(const ExponentEvaluator& ev, const Vector& dir, double floor, double cap) {
  return line_cutoff([&](double r) { return ev.charfn(r * dir); }, floor, cap);
}

DensityGrid invert_projection(const OUModel& model, double t, const Vector& l, const GridRequest& req) {
  if (l.size() != model.m) throw DimensionError("density: projection direction must have length m");
  if (!(l.norm() > 0.0)) throw DomainError("density: projection direction must be nonzero");
  require_density(model, t, req.force);
  const Vector u = l.normalized();
  const ExponentEvaluator ev(model, t);
  const PhiLine phi = [&](double s) { return ev.charfn(s * u); };
  const bool have = !req.x_min.empty();
  DensityGrid g = invert_line(phi, moments_along(ev, u), ev.shift().dot(u), req, have ? req.x_min[0] : 0.0,
                              have ? req.x_max[0] : 0.0, have);
  finish(g, req.force);
  return g;
}

DensityGrid invert_1d(const OUModel& model, double t, const GridRequest& req) {
  if (model.m != 1) throw DimensionError("invert_1d: model must have m = 1");
  if (!(t > 0.0)) throw DomainError("invert_1d: t must be positive");
  return invert_projection(model, t, Vector::Ones(1), req);
}

DensityGrid invert_2d(const OUModel& model, double t, const GridRequest& req) {
  if (model.m != 2) throw DimensionError("invert_2d: model must have m = 2");
  if (!(t > 0.0)) throw DomainError("invert_2d: t must be positive");
  require_density(model, t, req.force);
  const ExponentEvaluator ev(model, t);
  DensityGrid g;
  g.dim = 2;

  // Per-axis frequency extent from directional scans over a half circle.
  const int n_dirs = 16;
  double zmax[2] = {0.0, 0.0};
  for (int k = 0; k < n_dirs; ++k) {
    const double a = std::numbers::pi * k / n_dirs;
    Vector dir(2);
    dir << std::cos(a), std::sin(a);
    const CutoffSearch cut = phi_cutoff(ev, dir, req.phi_floor, req.z_cap);
    check_cap(cut, g.warnings);
    g.tail_modulus = std::max(g.tail_modulus, cut.modulus);
    zmax[0] = std::max(zmax[0], cut.radius * std::abs(dir(0)));
    zmax[1] = std::max(zmax[1], cut.radius * std::abs(dir(1)));
  }
  g.z_max = {zmax[0], zmax[1]};

  int n[2];
  double lo[2], hi[2];
  for (int axis = 0; axis < 2; ++axis) {
    if (!req.x_min.empty()) {
      if (req.x_min.size() != 2) throw ConfigError("density: 2-d ranges need two entries");
      lo[axis] = req.x_min[axis];
      hi[axis] = req.x_max[axis];
    } else {
      const Vector e = Vector::Unit(2, axis);
      const LineMoments mom = moments_along(ev, e);
      double half;
      double centre = mom.mean;
      if (mom.sd && *mom.sd > 0.0) {
        half = 12.0 * *mom.sd;
      } else {
        centre = ev.shift()(axis);
        half = 50.0 / unit_scale_radius([&](double r) { return ev.charfn(r * e); });
      }
      lo[axis] = centre - half;
      hi[axis] = centre + half;
    }
    if (!(hi[axis] > lo[axis])) throw DomainError("density: empty x-range");
    const int min_pts = std::min(req.min_points, 128);
    n[axis] = next_pow2(std::max<double>(min_pts, (hi[axis] - lo[axis]) * zmax[axis] / std::numbers::pi));
  }
  const long total = static_cast<long>(n[0]) * n[1];
  if (total > req.max_points) {
    throw AccuracyError("density: 2-d grid would need " + std::to_string(total) + " points",
                        static_cast<double>(total));
  }
  g.x_min = {lo[0], lo[1]};
  g.x_max = {hi[0], hi[1]};
  g.points = {n[0], n[1]};
  const double dz0 = 2.0 * std::numbers::pi / (hi[0] - lo[0]);
  const double dz1 = 2.0 * std::numbers::pi / (hi[1] - lo[1]);

  // Rows j0 ≥ n0/2 (z0 ≥ 0) are sampled; the rest follow from φ(−z) = conj φ(z).
  std::vector<Complex> grid(static_cast<std::size_t>(total));
  auto idx = [&](int j0, int j1) { return static_cast<std::size_t>(j0) * n[1] + j1; };
  const int rows = n[0] / 2 + 1;
  parallel_for(static_cast<long>(rows) * n[1], req.threads, [&](long flat) {
    const int j0 = n[0] / 2 + static_cast<int>(flat / n[1]);
    const int j1 = static_cast<int>(flat % n[1]);
    if (j0 >= n[0]) return;
    Vector z(2);
    z << (j0 - n[0] / 2) * dz0, (j1 - n[1] / 2) * dz1;
    grid[idx(j0, j1)] = ev.charfn(z);
  });
  for (int j0 = 0; j0 < n[0] / 2; ++j0) {
    const int m0 = n[0] - j0;  // index of −z0
    for (int j1 = 0; j1 < n[1]; ++j1) {
      const int m1 = n[1] - j1;
      if (m0 < n[0] && m1 < n[1]) {
        grid[idx(j0, j1)] = std::conj(grid[idx(m0, m1)]);
      } else {
        Vector z(2);
        z << (j0 - n[0] / 2) * dz0, (j1 - n[1] / 2) * dz1;
        grid[idx(j0, j1)] = ev.charfn(z);
      }
    }
  }
  for (int j0 = 0; j0 < n[0]; ++j0) {
    for (int j1 = 0; j1 < n[1]; ++j1) {
      const double z0 = (j0 - n[0] / 2) * dz0, z1 = (j1 - n[1] / 2) * dz1;
      grid[idx(j0, j1)] *= std::polar(1.0, -(z0 * lo[0] + z1 * lo[1]));
    }
  }
  Eigen::FFT<double> fft;
  std::vector<Complex> in, out;
  for (int j0 = 0; j0 < n[0]; ++j0) {
    in.assign(grid.begin() + idx(j0, 0), grid.begin() + idx(j0, 0) + n[1]);
    fft.fwd(out, in);
    std::copy(out.begin(), out.end(), grid.begin() + idx(j0, 0));
  }
  in.resize(n[0]);
  for (int j1 = 0; j1 < n[1]; ++j1) {
    for (int j0 = 0; j0 < n[0]; ++j0) in[j0] = grid[idx(j0, j1)];
    fft.fwd(out, in);
    for (int j0 = 0; j0 < n[0]; ++j0) grid[idx(j0, j1)] = out[j0];
  }
  const double scale = dz0 * dz1 / (4.0 * std::numbers::pi * std::numbers::pi);
  g.values.resize(static_cast<std::size_t>(total));
  for (int k0 = 0; k0 < n[0]; ++k0) {
    for (int k1 = 0; k1 < n[1]; ++k1) {
      const double sign = (k0 + k1) % 2 == 0 ? 1.0 : -1.0;
      g.values[idx(k0, k1)] = sign * scale * grid[idx(k0, k1)].real();
    }
  }
  finish(g, req.force);
  return g;
}

Vector window_center(const OUModel& model, double t, double eps) {
  if (!(t > 0.0)) throw DomainError("window_center: t must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("window_center: epsilon must lie in (0, 1)");
  validate(model);
  Vector mean = model.measure.is_zero() ? Vector::Zero(model.d) : compensator_mean(model.measure, eps, 1.0);
  return deterministic_part(model, t) + integrated_propagator(model.A, t) * (model.D * mean);
}

WindowBound window_bound(const OUModel& model, double t, double eps, std::optional<double> half_width) {
  if (model.m != 1 || model.d != 1 || model.has_gaussian()) {
    throw DomainError("window bound: requires m = d = 1 and no Gaussian part");
  }
  if (!(t > 0.0)) throw DomainError("window bound: t must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("window bound: epsilon must lie in (0, 1)");
  const double w = half_width.value_or(std::sqrt(eps));
  if (!(w > 0.0)) throw DomainError("window bound: half width must be positive");
  const double r = model.measure.is_zero() ? 0.0 : rho(model.measure, eps);
  const double dn = std::abs(model.D(0, 0));
  const double log_inv = std::log(1.0 / eps);
  WindowBound b;
  b.no_jump = std::exp(-t * r * log_inv);
  b.chebyshev = dn * dn * t * std::exp(2.0 * std::abs(model.A(0, 0)) * t) * eps * eps * log_inv * r / (w * w);
  b.value = b.no_jump - b.chebyshev;
  b.vacuous = b.value <= 0.0;
  return b;
}

double window_lower_bound(const OUModel& model, double t, double eps) {
  return window_bound(model, t, eps).value;
}

LpProbe lp_irregularity_probe(const OUModel& model, double t, double p, std::vector<double> eps,
                              long mc_samples, const SimConfig& sim) {
  if (!(p > 1.0)) throw DomainError("lp probe: p must exceed 1");
  if (eps.empty()) throw DomainError("lp probe: empty epsilon list");
  LpProbe probe;
  probe.p = p;
  probe.alpha = 0.5 + 0.5 / p;
  probe.t = t;
  probe.mc_samples = mc_samples;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  const double expo = 2.0 - 2.0 * probe.alpha;
  std::optional<SampleBatch> batch;
  if (mc_samples > 0) {
    SimConfig cfg = sim;
    cfg.samples = mc_samples;
    batch = sample_endpoint(model, t, cfg);
  }
  for (double e : eps) {
    LpProbeRow row;
    row.eps = e;
    const double half = std::pow(e, probe.alpha);
    row.center = window_center(model, t, e)(0);
    row.lo = row.center - half;
    row.hi = row.center + half;
    const double width = std::pow(2.0 * half, expo);
    row.bound = window_bound(model, t, e, half).value;
    row.bound_ratio = row.bound / width;
    if (batch) {
      for (Eigen::Index i = 0; i < batch->samples.rows(); ++i) {
        const double x = batch->samples(i, 0);
        if (x >= row.lo && x <= row.hi) ++row.hits;
      }
      row.mc_probability = static_cast<double>(row.hits) / static_cast<double>(mc_samples);
      row.mc_ratio = row.mc_probability / width;
      row.insufficient = row.hits < 10;
    }
    probe.rows.push_back(row);
  }
  probe.bound_ratio_increasing = probe.rows.size() >= 2;
  for (std::size_t i = 1; i < probe.rows.size(); ++i) {
    if (!(probe.rows[i].bound_ratio > probe.rows[i - 1].bound_ratio)) probe.bound_ratio_increasing = false;
  }
  return probe;
}

}  // namespace levyou
