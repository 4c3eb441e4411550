#include "doctest.h"
#include "fixtures.hpp"
#include "levyou/density.hpp"
#include "levyou/errors.hpp"
#include "levyou/random.hpp"
#include "levyou/simulate.hpp"

#include <cmath>
#include <numeric>

using namespace levyou;
using fixtures::mat;

namespace {

SimConfig config(long n, std::uint64_t seed = 7) {
  SimConfig c;
  c.samples = n;
  c.seed = seed;
  return c;
}

double mean_of(const Matrix& s, int col = 0) { return s.col(col).mean(); }
double var_of(const Matrix& s, int col = 0) {
  const double m = mean_of(s, col);
  return (s.col(col).array() - m).square().sum() / static_cast<double>(s.rows() - 1);
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  using B = Philox4x32Block;
  CHECK(philox4x32(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  PhiloxStream s(42, 3, 11);
  for (int i = 0; i < 1000; ++i) {
    const double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("alias table reproduces its weights") {
  const AliasTable table({1.0, 3.0, 0.0, 6.0});
  PhiloxStream rng(1, 0, 0);
  std::vector<double> counts(4, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) counts[table.draw(rng.uniform())] += 1.0;
  CHECK(counts[2] == 0.0);
  const double want[] = {0.1, 0.3, 0.0, 0.6};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(counts[i] / n - want[i]) <= 4.0 * std::sqrt(want[i] * (1 - want[i]) / n) + 1e-12);
  }
  CHECK_THROWS_AS(AliasTable({0.0, 0.0}), DomainError);
}

TEST_CASE("zero noise follows the deterministic flow") {
  auto model = make_model(mat({{0.3, 1.0}, {-1.0, 0.0}}), Matrix(), mat({{1}, {0}}), LevyMeasure(1));
  model.x0 = fixtures::mat({{1.0}, {2.0}}).col(0);
  const auto batch = sample_endpoint(model, 1.5, config(20));
  const Vector want = expm(1.5 * model.A) * model.x0;
  for (Eigen::Index i = 0; i < batch.samples.rows(); ++i) {
    CHECK(batch.samples.row(i).transpose() == want);
  }
  const auto paths = sample_path(model, {0.0, 0.5, 1.5}, config(3));
  for (const auto& p : paths.paths) {
    CHECK((p[1] - expm(0.5 * model.A) * model.x0).norm() == doctest::Approx(0.0));
    CHECK((p[2] - want).norm() <= 1e-14 * want.norm());
  }
}

TEST_CASE("same seed and stream give identical batches") {
  const auto model = fixtures::scalar_jump_model(fixtures::linear_factorial_measure(), 1.0);
  auto cfg = config(200, 99);
  cfg.threads = 3;
  const auto a = sample_endpoint(model, 1.0, cfg);
  cfg.threads = 1;
  const auto b = sample_endpoint(model, 1.0, cfg);
  CHECK(a.samples == b.samples);
  cfg.stream = 1;
  const auto c = sample_endpoint(model, 1.0, cfg);
  CHECK(a.samples != c.samples);
  CHECK(a.cutoff > 0.0);
  CHECK(a.expected_jumps <= 1e4 * (1 + 1e-9));
}

TEST_CASE("jump counts of a single large atom are Poisson") {
  const double lambda = 3.0;
  const auto model = fixtures::scalar_jump_model(fixtures::single_atom(2.0, lambda), 0.0);
  const long n = 100000;
  const auto batch = sample_endpoint(model, 1.0, config(n));
  CHECK(batch.cutoff == 0.0);
  const Vector counts = batch.samples.col(0) / 2.0;
  CHECK(std::abs(counts.mean() - lambda) <= 3.0 * std::sqrt(lambda / n));
  const double var = (counts.array() - counts.mean()).square().sum() / (n - 1);
  CHECK(std::abs(var - lambda) <= 4.0 * std::sqrt((lambda + 2 * lambda * lambda) / n));
}

TEST_CASE("gaussian moments match the covariance integral") {
  const auto model = fixtures::gaussian_model();
  const long n = 200000;
  const auto batch = sample_endpoint(model, 1.0, config(n));
  const double sigma = 3.194528049465325;
  CHECK(std::abs(mean_of(batch.samples)) <= 3.0 * std::sqrt(sigma / n));
  CHECK(std::abs(var_of(batch.samples) - sigma) <= 3.0 * sigma * std::sqrt(2.0 / n));
}

TEST_CASE("superposition of split noise is exact") {
  LevyMeasure pi(1);
  pi.add(ExplicitAtoms({Vector::Constant(1, 0.4), Vector::Constant(1, 1.7)}, {2.0, 0.5}));
  pi.add(RadialDensity::power_law(1, 1.0, 0.8, 2.0, {}));
  auto model = make_model(mat({{-0.3, 1.0}, {-1.0, 0.2}}), mat({{0.5}, {0.2}}), mat({{1.0}, {0.3}}), pi);
  model.x0 = mat({{0.7}, {-1.1}}).col(0);
  model.a = mat({{0.2}, {0.1}}).col(0);
  SimConfig cfg = config(1000, 5);
  cfg.cutoff = 0.05;
  const SimulationPlan plan = make_simulation_plan(model, {0.0, 0.4, 1.0}, cfg);
  const NoiseRealization nothing{{Vector::Zero(2), Vector::Zero(2)}, {}, {}};
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto noise = draw_noise(model, plan, cfg, i);
    const auto [z1, z2] = split_noise(noise, {0}, 2);
    const auto full = propagate(model, plan, noise);
    const auto x1 = propagate(model, plan, z1, false);
    const auto x2 = propagate(model, plan, z2, false);
    const auto det = propagate(model, plan, nothing);
    for (std::size_t k = 0; k < full.size(); ++k) {
      worst = std::max(worst, (x1[k] + x2[k] + det[k] - full[k]).norm() / std::max(1.0, full[k].norm()));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("path endpoints have the endpoint law") {
  const auto model = make_model(mat({{-0.5}}), mat({{0.3}}), mat({{1.0}}), fixtures::single_atom(0.5, 2.0));
  const long n = 20000;
  const auto ends = sample_endpoint(model, 1.0, config(n, 1));
  const auto paths = sample_path(model, {0.0, 0.25, 0.5, 1.0}, config(n, 2));
  std::vector<double> a(ends.samples.data(), ends.samples.data() + n), b;
  for (const auto& p : paths.paths) b.push_back(p.back()(0));
  CHECK(ks_two_sample(a, b) < 1.63 * std::sqrt(2.0 / n));
  CHECK_THROWS_AS(sample_path(model, {0.0, 0.5, 0.5}, config(2)), DomainError);
  CHECK_THROWS_AS(sample_path(model, {0.1, 0.5}, config(2)), DomainError);
}

TEST_CASE("small-jump bookkeeping") {
  // Finite variance, infinite activity: c r^{-1.8} on (0, 1].
  LevyMeasure pi(1);
  pi.add(RadialDensity::power_law(1, 1.0, 0.8, 1.0, {}));
  const auto model = fixtures::scalar_jump_model(pi, -0.5);
  const double t = 1.0;
  const double time_factor = (1.0 - std::exp(-1.0)) / 1.0;  // ∫_0^1 e^{-s} ds
  const double second = 1.0 / 1.2;                          // ∫ u² Π(du)
  const double exact_var = time_factor * second;
  const long n = 60000;
  for (double cut : {0.02, 0.01}) {
    SimConfig cfg = config(n, 3);
    cfg.cutoff = cut;
    const auto drop = sample_endpoint(model, t, cfg);
    const double dropped = std::pow(cut, 1.2) / 1.2;
    CHECK(drop.dropped_variance == doctest::Approx(dropped).epsilon(1e-9));
    const double v = exact_var - time_factor * dropped;
    CHECK(std::abs(mean_of(drop.samples)) <= 3.0 * std::sqrt(v / n));
    CHECK(std::abs(var_of(drop.samples) - v) <= 4.0 * v * std::sqrt(2.0 / n) + 0.05 * v);
    cfg.policy = SmallJumpPolicy::gaussian_approx;
    const auto approx = sample_endpoint(model, t, cfg);
    CHECK(std::abs(var_of(approx.samples) - exact_var) <= 4.0 * exact_var * std::sqrt(2.0 / n) + 0.05 * exact_var);
  }
  SimConfig a = config(n, 4), b = config(n, 5);
  a.cutoff = 0.02;
  b.cutoff = 0.01;
  const auto xa = sample_endpoint(model, t, a), xb = sample_endpoint(model, t, b);
  const double band = 3.0 * std::sqrt(2.0 * exact_var / n);
  CHECK(std::abs(mean_of(xa.samples) - mean_of(xb.samples)) <= band);
}

TEST_CASE("configuration parsing") {
  const auto c = sim_config_from_json(Json::parse(R"({"cutoff": 0.1, "policy": "gaussian_approx", "samples": 5})"), 11);
  CHECK(c.cutoff == 0.1);
  CHECK(c.policy == SmallJumpPolicy::gaussian_approx);
  CHECK(c.seed == 11);
  CHECK_THROWS_AS(sim_config_from_json(Json::parse(R"({"cutoff": 2})")), ConfigError);
  CHECK_THROWS_AS(sim_config_from_json(Json::parse(R"({"policy": "other"})")), ConfigError);
  CHECK_THROWS_AS(sim_config_from_json(Json::parse(R"({"samples": 0})")), ConfigError);
}

TEST_CASE("comparison guards") {
  DensityGrid g;
  g.dim = 2;
  SampleBatch b;
  b.m = 1;
  b.samples = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(compare_to_density(b, g), DimensionError);
  b.samples.resize(0, 1);
  CHECK_THROWS_AS(compare_to_density(b, g), DomainError);
}
