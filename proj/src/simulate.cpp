#include "levyou/simulate.hpp"

#include "levyou/density.hpp"
#include "levyou/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace levyou {

namespace {

constexpr double kMaxExpectedJumps = 1e4;
constexpr double kSmallestCutoff = 1e-300;

Matrix psd_sqrt(const Matrix& s) {
  if (s.size() == 0 || s.isZero(0.0)) return Matrix::Zero(s.rows(), s.cols());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
  const Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

Matrix propagator(const Matrix& a, double tau) {
  if (a.rows() == 1) return Matrix::Constant(1, 1, std::exp(a(0, 0) * tau));
  return expm(tau * a);
}

template <class F>
void parallel_for(long n, int threads, F&& body) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<long>(1, n / 64))));
  if (threads == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex mu;
  for (int w = 0; w < threads; ++w) {
    const long lo = n * w / threads, hi = n * (w + 1) / threads;
    pool.emplace_back([&, lo, hi] {
      try {
        for (long i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string to_string(SmallJumpPolicy p) {
  return p == SmallJumpPolicy::drop_compensate ? "drop_compensate" : "gaussian_approx";
}

SmallJumpPolicy small_jump_policy_from_string(const std::string& s) {
  if (s == "drop_compensate") return SmallJumpPolicy::drop_compensate;
  if (s == "gaussian_approx") return SmallJumpPolicy::gaussian_approx;
  throw ConfigError("simulate.policy: expected drop_compensate or gaussian_approx, got " + s);
}

SimConfig sim_config_from_json(const Json& j, std::uint64_t default_seed) {
  SimConfig c;
  c.seed = default_seed;
  if (j.is_null()) return c;
  if (!j.is_object()) throw ConfigError("simulate: expected an object");
  if (j.contains("cutoff") && !j["cutoff"].is_null()) c.cutoff = j["cutoff"].get<double>();
  if (j.contains("policy")) c.policy = small_jump_policy_from_string(j["policy"].get<std::string>());
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("stream")) c.stream = j["stream"].get<std::uint32_t>();
  if (j.contains("samples")) c.samples = j["samples"].get<long>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  if (c.samples < 1) throw ConfigError("simulate.samples: must be >= 1");
  if (c.cutoff && !(*c.cutoff > 0.0 && *c.cutoff <= 1.0)) {
    throw ConfigError("simulate.cutoff: must lie in (0, 1]");
  }
  return c;
}

Json to_json(const SimConfig& c) {
  Json j;
  j["cutoff"] = c.cutoff ? Json(*c.cutoff) : Json(nullptr);
  j["policy"] = to_string(c.policy);
  j["seed"] = c.seed;
  j["stream"] = c.stream;
  j["samples"] = c.samples;
  j["threads"] = c.threads;
  return j;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) return;
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("alias table: weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("alias table: total weight must be positive");
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back(), l = large.back();
    small.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t i : large) prob_[i] = 1.0;
  for (std::size_t i : small) prob_[i] = 1.0;
}

std::size_t AliasTable::draw(double u01) const {
  const double x = u01 * static_cast<double>(prob_.size());
  const std::size_t i = std::min(static_cast<std::size_t>(x), prob_.size() - 1);
  return (x - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
}

double default_cutoff(const LevyMeasure& pi, double t) {
  if (pi.is_zero()) return 0.0;
  if (!pi.infinite_mass() && t * pi.total_mass() <= kMaxExpectedJumps) return 0.0;
  auto ok = [&](double log_eps) { return t * mass_above(pi, std::exp(log_eps)) <= kMaxExpectedJumps; };
  if (!ok(0.0)) return 1.0;
  double lo = std::log(kSmallestCutoff), hi = 0.0;
  if (ok(lo)) return kSmallestCutoff;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return std::exp(hi);
}

JumpPlan make_jump_plan(const LevyMeasure& pi, double t, const SimConfig& cfg) {
  JumpPlan plan;
  plan.cutoff = cfg.cutoff ? *cfg.cutoff : default_cutoff(pi, t);
  if (!(plan.cutoff >= 0.0 && plan.cutoff <= 1.0)) throw DomainError("simulate: cutoff must lie in [0, 1]");
  const auto d = pi.dim();
  plan.small_covariance = Matrix::Zero(d, d);
  for (const auto& c : pi.components()) {
    const double mass = c->mass_above(plan.cutoff);
    if (!std::isfinite(mass)) throw DomainError("simulate: infinite mass above the cutoff");
    plan.component_mass.push_back(mass);
    plan.intensity += mass;
    std::vector<WeightedAtom> atoms;
    AliasTable table;
    if (c->is_atomic() && mass > 0.0) {
      atoms = c->atoms_above(plan.cutoff);
      std::vector<double> w;
      for (const auto& a : atoms) w.push_back(a.weight);
      table = AliasTable(w);
    }
    plan.atoms.push_back(std::move(atoms));
    plan.atom_tables.push_back(std::move(table));
    plan.compensation.push_back(plan.cutoff < 1.0 ? c->compensator_mean(plan.cutoff, 1.0) : Vector::Zero(d));
    if (plan.cutoff > 0.0) plan.small_covariance += c->small_jump_covariance(plan.cutoff);
  }
  if (plan.intensity > 0.0) plan.component_table = AliasTable(plan.component_mass);
  plan.dropped_variance = plan.small_covariance.trace();
  return plan;
}

SimulationPlan make_simulation_plan(const OUModel& model, std::vector<double> grid, const SimConfig& cfg) {
  validate(model);
  if (grid.size() < 2 || grid.front() != 0.0) throw DomainError("simulate: time grid must start at 0 and have >= 2 nodes");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]) || !std::isfinite(grid[i])) {
      throw DomainError("simulate: time grid must be strictly increasing");
    }
  }
  if (cfg.samples < 1) throw DomainError("simulate: sample count must be >= 1");
  SimulationPlan plan;
  plan.grid = std::move(grid);
  plan.jumps = make_jump_plan(model.measure, plan.grid.back(), cfg);

  // Gaussian model for the interval covariances; gaussian_approx folds the
  // small-jump covariance D S Dᵀ into BBᵀ.
  OUModel gauss = model;
  if (cfg.policy == SmallJumpPolicy::gaussian_approx && plan.jumps.cutoff > 0.0) {
    Matrix q = Matrix::Zero(model.m, model.m);
    if (model.k > 0) q += model.B * model.B.transpose();
    q += model.D * plan.jumps.small_covariance * model.D.transpose();
    gauss.B = psd_sqrt(q);
    gauss.k = model.m;
  }
  for (std::size_t k = 1; k < plan.grid.size(); ++k) {
    const double dt = plan.grid[k] - plan.grid[k - 1];
    plan.propagator.push_back(propagator(model.A, dt));
    plan.integrated.push_back(integrated_propagator(model.A, dt));
    plan.gaussian_factor.push_back(gauss.k > 0 ? psd_sqrt(gaussian_covariance(gauss, dt))
                                               : Matrix::Zero(model.m, model.m));
  }
  return plan;
}

NoiseRealization draw_noise(const OUModel& model, const SimulationPlan& plan, const SimConfig& cfg,
                            std::uint64_t index) {
  PhiloxStream rng(cfg.seed, cfg.stream, index);
  NoiseRealization noise;
  for (const auto& f : plan.gaussian_factor) {
    Vector g = Vector::Zero(model.m);
    if (!f.isZero(0.0)) {
      Vector xi(f.cols());
      for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
      g = f * xi;
    }
    noise.gaussian.push_back(std::move(g));
  }
  const JumpPlan& jp = plan.jumps;
  for (std::size_t c = 0; c < jp.component_mass.size(); ++c) noise.components.push_back(static_cast<int>(c));
  const double horizon = plan.grid.back();
  const double lambda = jp.intensity * horizon;
  if (lambda > 0.0) {
    std::poisson_distribution<long> poisson(lambda);
    const long count = poisson(rng);
    const auto& comps = model.measure.components();
    const UniformSource u01 = [&rng] { return rng.uniform(); };
    noise.jumps.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      Jump j;
      j.time = horizon * rng.uniform();
      j.component = static_cast<int>(jp.component_table.draw(rng.uniform()));
      if (comps[j.component]->is_atomic()) {
        j.mark = jp.atoms[j.component][jp.atom_tables[j.component].draw(rng.uniform())].point;
      } else {
        j.mark = comps[j.component]->draw_above(jp.cutoff, u01);
      }
      noise.jumps.push_back(std::move(j));
    }
    std::sort(noise.jumps.begin(), noise.jumps.end(),
              [](const Jump& a, const Jump& b) { return a.time < b.time; });
  }
  return noise;
}

std::vector<Vector> propagate(const OUModel& model, const SimulationPlan& plan,
                              const NoiseRealization& noise, bool include_deterministic) {
  std::vector<Vector> out;
  out.reserve(plan.grid.size());
  Vector x = include_deterministic ? model.x0 : Vector::Zero(model.m);
  out.push_back(x);
  Vector comp = Vector::Zero(model.d);
  for (int c : noise.components) comp += plan.jumps.compensation[c];
  const Vector comp_drift = model.D * comp;
  std::size_t next = 0;
  for (std::size_t k = 1; k < plan.grid.size(); ++k) {
    const double tk = plan.grid[k];
    x = plan.propagator[k - 1] * x;
    if (include_deterministic) x += plan.integrated[k - 1] * model.a;
    x += noise.gaussian[k - 1];
    x -= plan.integrated[k - 1] * comp_drift;
    const bool last = k + 1 == plan.grid.size();
    while (next < noise.jumps.size() && (noise.jumps[next].time <= tk || last)) {
      const Jump& j = noise.jumps[next++];
      x += propagator(model.A, tk - j.time) * (model.D * j.mark);
    }
    out.push_back(x);
  }
  return out;
}

std::pair<NoiseRealization, NoiseRealization> split_noise(const NoiseRealization& noise,
                                                          const std::vector<int>& first_components,
                                                          int n_components) {
  auto in_first = [&](int c) {
    return std::find(first_components.begin(), first_components.end(), c) != first_components.end();
  };
  NoiseRealization a, b;
  a.gaussian = noise.gaussian;
  for (const auto& g : noise.gaussian) b.gaussian.push_back(Vector::Zero(g.size()));
  for (const auto& j : noise.jumps) (in_first(j.component) ? a : b).jumps.push_back(j);
  for (int c = 0; c < n_components; ++c) {
    if (std::find(noise.components.begin(), noise.components.end(), c) == noise.components.end()) continue;
    (in_first(c) ? a : b).components.push_back(c);
  }
  return {std::move(a), std::move(b)};
}

SampleBatch sample_endpoint(const OUModel& model, double t, const SimConfig& cfg) {
  if (!(t > 0.0)) throw DomainError("sample_endpoint: t must be positive");
  const SimulationPlan plan = make_simulation_plan(model, {0.0, t}, cfg);
  SampleBatch batch;
  batch.t = t;
  batch.m = static_cast<int>(model.m);
  batch.config = cfg;
  batch.cutoff = plan.jumps.cutoff;
  batch.intensity = plan.jumps.intensity;
  batch.expected_jumps = plan.jumps.intensity * t;
  batch.dropped_variance = cfg.policy == SmallJumpPolicy::drop_compensate ? plan.jumps.dropped_variance : 0.0;
  batch.samples.resize(cfg.samples, model.m);
  parallel_for(cfg.samples, cfg.threads, [&](long i) {
    const auto noise = draw_noise(model, plan, cfg, static_cast<std::uint64_t>(i));
    batch.samples.row(i) = propagate(model, plan, noise).back().transpose();
  });
  return batch;
}

PathBatch sample_path(const OUModel& model, const std::vector<double>& grid, const SimConfig& cfg) {
  const SimulationPlan plan = make_simulation_plan(model, grid, cfg);
  PathBatch batch;
  batch.grid = plan.grid;
  batch.m = static_cast<int>(model.m);
  batch.config = cfg;
  batch.cutoff = plan.jumps.cutoff;
  batch.paths.resize(static_cast<std::size_t>(cfg.samples));
  parallel_for(cfg.samples, cfg.threads, [&](long i) {
    batch.paths[i] = propagate(model, plan, draw_noise(model, plan, cfg, static_cast<std::uint64_t>(i)));
  });
  return batch;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

DensityComparison compare_to_density(const SampleBatch& batch, const DensityGrid& grid, int bins,
                                     double l1_threshold) {
  const long n = batch.samples.rows();
  if (n == 0) throw DomainError("compare_to_density: empty batch");
  if (batch.m != grid.dim) throw DimensionError("compare_to_density: batch and grid dimensions differ");
  if (bins < 1) throw DomainError("compare_to_density: bins must be >= 1");
  DensityComparison out;
  out.ks_critical = 1.63 / std::sqrt(static_cast<double>(n));
  const double nd = static_cast<double>(n);
  std::vector<double> prob, counts;
  double outside = 0.0;

  if (grid.dim == 1) {
    const int np = grid.points[0];
    const double dx = grid.step(0);
    // Cumulative trapezoid over the nodes of the grid.
    std::vector<double> cdf(np, 0.0);
    for (int k = 1; k < np; ++k) cdf[k] = cdf[k - 1] + 0.5 * dx * (grid.values[k - 1] + grid.values[k]);
    const double total = cdf.back();
    auto F = [&](double x) {
      const double s = (x - grid.x_min[0]) / dx;
      if (s <= 0.0) return 0.0;
      if (s >= np - 1) return 1.0;
      const int k = static_cast<int>(s);
      const double f = s - k;
      return (cdf[k] + f * (cdf[k + 1] - cdf[k])) / total;
    };
    std::vector<double> xs(n);
    for (long i = 0; i < n; ++i) xs[i] = batch.samples(i, 0);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (long i = 0; i < n; ++i) {
      const double f = F(xs[i]);
      ks = std::max({ks, std::abs(f - i / nd), std::abs(f - (i + 1) / nd)});
    }
    out.ks = ks;
    const double lo = grid.x_min[0], hi = grid.coord(0, np - 1);
    const double w = (hi - lo) / bins;
    counts.assign(bins, 0.0);
    for (double x : xs) {
      if (x < lo || x >= hi) {
        outside += 1.0;
        continue;
      }
      counts[std::min(bins - 1, static_cast<int>((x - lo) / w))] += 1.0;
    }
    for (int b = 0; b < bins; ++b) prob.push_back(F(lo + (b + 1) * w) - F(lo + b * w));
  } else {
    const int per_axis = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(bins)))));
    const double lo0 = grid.x_min[0], hi0 = grid.coord(0, grid.points[0] - 1);
    const double lo1 = grid.x_min[1], hi1 = grid.coord(1, grid.points[1] - 1);
    const double w0 = (hi0 - lo0) / per_axis, w1 = (hi1 - lo1) / per_axis;
    counts.assign(per_axis * per_axis, 0.0);
    for (long i = 0; i < n; ++i) {
      const double x = batch.samples(i, 0), y = batch.samples(i, 1);
      if (x < lo0 || x >= hi0 || y < lo1 || y >= hi1) {
        outside += 1.0;
        continue;
      }
      const int b0 = std::min(per_axis - 1, static_cast<int>((x - lo0) / w0));
      const int b1 = std::min(per_axis - 1, static_cast<int>((y - lo1) / w1));
      counts[b0 * per_axis + b1] += 1.0;
    }
    const int sub = 16;
    for (int b0 = 0; b0 < per_axis; ++b0) {
      for (int b1 = 0; b1 < per_axis; ++b1) {
        double s = 0.0;
        for (int i = 0; i < sub; ++i) {
          for (int j = 0; j < sub; ++j) {
            Vector x(2);
            x << lo0 + (b0 + (i + 0.5) / sub) * w0, lo1 + (b1 + (j + 0.5) / sub) * w1;
            s += grid.at(x);
          }
        }
        prob.push_back(s * w0 * w1 / (sub * sub));
      }
    }
    double total = 0.0;
    for (double p : prob) total += p;
    for (double& p : prob) p /= std::max(total, grid.normalization);
  }

  out.bins = static_cast<int>(prob.size());
  double inside_prob = 0.0;
  for (std::size_t b = 0; b < prob.size(); ++b) {
    const double p = prob[b];
    inside_prob += p;
    out.l1 += std::abs(counts[b] / nd - p);
    const double var = nd * p * (1.0 - p);
    out.z_scores.push_back(var > 0.0 ? (counts[b] - nd * p) / std::sqrt(var)
                                     : (counts[b] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
  }
  out.outside_fraction = outside / nd;
  out.l1 += std::abs(out.outside_fraction - std::max(0.0, 1.0 - inside_prob));
  out.pass = out.l1 <= l1_threshold && (!out.ks || *out.ks < out.ks_critical);
  return out;
}

}  // namespace levyou
