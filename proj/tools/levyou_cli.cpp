#include "levyou/charfn.hpp"
#include "levyou/criteria.hpp"
#include "levyou/density.hpp"
#include "levyou/errors.hpp"
#include "levyou/model.hpp"
#include "levyou/reproduce.hpp"
#include "levyou/simulate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef LEVYOU_VERSION
#define LEVYOU_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace levyou;

namespace {

const auto g_start = std::chrono::steady_clock::now();

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool force = false;
};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Run {
 public:
  Run(std::string subcommand, const Common& common) : sub_(std::move(subcommand)), common_(common) {
    fs::create_directories(common_.out);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path target = fs::path(common_.out) / name;
    const fs::path tmp = fs::path(target.string() + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw Error("cannot write " + tmp.string());
      f << content;
      if (!f.flush()) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
    outputs_.push_back(target.string());
  }

  Json params = Json::object();
  std::optional<std::uint64_t> seed;

  void finish() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - g_start).count();
    Json m = {{"config", common_.config},
              {"subcommand", sub_},
              {"parameters", params},
              {"outputs", outputs_},
              {"wall_clock_seconds", wall},
              {"version", LEVYOU_VERSION},
              {"seed", seed ? Json(*seed) : Json(nullptr)}};
    write("manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string sub_;
  const Common& common_;
  std::vector<std::string> outputs_;
};

Json load(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  return read_json_file(c.config);
}

double run_time(const Json& cfg, std::optional<double> flag) {
  const double t = flag ? *flag : load_run(cfg).t;
  if (!(t > 0.0)) throw DomainError("t must be positive");
  return t;
}

std::uint64_t run_seed(const Json& cfg, const Common& c) { return c.seed ? *c.seed : load_run(cfg).seed; }

int cmd_analyze(const Common& c, std::optional<double> t_flag) {
  const Json cfg = load(c);
  const OUModel model = load_model(cfg);
  const RunConfig run = load_run(cfg);
  const double t = t_flag ? *t_flag : run.t;
  const auto opt = report_options_from_json(run.tolerances, run_seed(cfg, c));
  const RegularityReport rep = assemble_report(model, t, opt);
  Run r("analyze", c);
  r.params = {{"t", t}};
  r.seed = run_seed(cfg, c);
  r.write("report.json", to_json(rep).dump(2) + "\n");
  r.finish();
  std::cout << rep.summary();
  return 0;
}

struct CharfnFlags {
  std::optional<double> t;
  double z_min = 0.0;
  double z_max = 10.0;
  int points = 101;
  bool log_grid = false;
  bool bounds = false;
};

int cmd_charfn(const Common& c, const CharfnFlags& f) {
  const Json cfg = load(c);
  const OUModel model = load_model(cfg);
  const double t = run_time(cfg, f.t);
  const Json section = cfg.value("charfn", Json::object());
  Vector dir = section.contains("direction") ? vector_from_json(section["direction"], "charfn.direction")
                                             : Vector(Vector::Unit(model.m, 0));
  if (dir.size() != model.m) throw DimensionError("charfn.direction: expected length " + std::to_string(model.m));
  if (!(dir.norm() > 0.0)) throw DomainError("charfn.direction: must be nonzero");
  dir /= dir.norm();
  if (f.points < 1) throw ConfigError("--points: must be >= 1");
  if (f.log_grid && !(f.z_min > 0.0)) throw ConfigError("--log requires --z-min > 0");
  if (!(f.z_max >= f.z_min)) throw ConfigError("--z-max must not be below --z-min");

  std::vector<double> grid(f.points);
  for (int i = 0; i < f.points; ++i) {
    const double s = f.points == 1 ? 0.0 : double(i) / (f.points - 1);
    grid[i] = f.log_grid ? std::pow(10.0, std::log10(f.z_min) + s * (std::log10(f.z_max) - std::log10(f.z_min))) : f.z_min + s * (f.z_max - f.z_min);
  }

  const ExponentEvaluator ev(model, t);
  std::optional<Lemma1Estimate> est;
  double occupation_alpha = 1.0, occupation_beta = 1.0;
  if (f.bounds) {
    occupation_alpha = section.value("occupation_alpha", 1.0);
    occupation_beta = section.value("occupation_beta", 1.0);
    est = lemma1_gamma(model, t, occupation_alpha, occupation_beta);
  }

  std::ostringstream csv;
  csv << "z,re_phi,im_phi,abs_phi";
  if (f.bounds) csv << ",scalar_bound,estimate_bound";
  csv << "\n";
  for (double s : grid) {
    const Vector z = s * dir;
    const Complex phi = ev.charfn(z);
    csv << num(s) << "," << num(phi.real()) << "," << num(phi.imag()) << "," << num(std::abs(phi));
    if (f.bounds) {
      std::string scalar;
      try {
        scalar = num(theorem1_bound(model, t, s));
      } catch (const DomainError&) {
      }
      csv << "," << scalar << "," << num(theorem2_bound(model, z, *est));
    }
    csv << "\n";
  }
  Run r("charfn", c);
  r.params = {{"t", t}, {"z_min", f.z_min}, {"z_max", f.z_max}, {"points", f.points},
              {"log", f.log_grid}, {"bounds", f.bounds}, {"direction", vector_to_json(dir)}};
  if (est) {
    r.params["occupation_alpha"] = occupation_alpha;
    r.params["occupation_beta"] = occupation_beta;
    r.params["gamma"] = est->gamma;
  }
  r.write("charfn.csv", csv.str());
  r.finish();
  return 0;
}

int cmd_density(const Common& c, std::optional<double> t_flag) {
  const Json cfg = load(c);
  const OUModel model = load_model(cfg);
  const double t = run_time(cfg, t_flag);
  const Json section = cfg.value("density", Json::object());
  GridRequest req = grid_request_from_json(section);
  req.force = req.force || c.force;
  req.threads = c.threads;

  DensityGrid g;
  if (section.contains("direction")) {
    g = invert_projection(model, t, vector_from_json(section["direction"], "density.direction"), req);
  } else if (model.m == 1) {
    g = invert_1d(model, t, req);
  } else if (model.m == 2) {
    g = invert_2d(model, t, req);
  } else {
    throw UnsupportedError("density: m > 2 needs density.direction for a projected density");
  }

  std::ostringstream csv;
  if (g.dim == 1) {
    csv << "x,p\n";
    for (int i = 0; i < g.points[0]; ++i) csv << num(g.coord(0, i)) << "," << num(g.values[i]) << "\n";
  } else {
    csv << "x,y,p\n";
    for (int i = 0; i < g.points[0]; ++i) {
      for (int j = 0; j < g.points[1]; ++j) {
        csv << num(g.coord(0, i)) << "," << num(g.coord(1, j)) << ","
            << num(g.values[std::size_t(i) * g.points[1] + j]) << "\n";
      }
    }
  }
  Run r("density", c);
  r.params = {{"t", t}, {"force", req.force}, {"threads", req.threads}};
  r.write("density.csv", csv.str());
  r.write("density.json", metadata_to_json(g).dump(2) + "\n");
  r.finish();
  for (const auto& w : g.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

struct SimulateFlags {
  std::optional<double> t;
  std::optional<long> n;
  int steps = 0;
};

int cmd_simulate(const Common& c, const SimulateFlags& f) {
  const Json cfg = load(c);
  const OUModel model = load_model(cfg);
  const double t = run_time(cfg, f.t);
  SimConfig sim = sim_config_from_json(cfg.value("simulate", Json()), load_run(cfg).seed);
  if (c.seed) sim.seed = *c.seed;
  if (f.n) sim.samples = *f.n;
  if (sim.samples < 1) throw ConfigError("--n: must be >= 1");
  sim.threads = c.threads;

  std::ostringstream csv;
  if (f.steps > 0) {
    std::vector<double> grid(f.steps + 1);
    for (int k = 0; k <= f.steps; ++k) grid[k] = t * k / f.steps;
    const PathBatch batch = sample_path(model, grid, sim);
    csv << "path,t";
    for (int j = 0; j < model.m; ++j) csv << ",x" << j;
    csv << "\n";
    for (std::size_t i = 0; i < batch.paths.size(); ++i) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        csv << i << "," << num(grid[k]);
        for (int j = 0; j < model.m; ++j) csv << "," << num(batch.paths[i][k](j));
        csv << "\n";
      }
    }
  } else {
    const SampleBatch batch = sample_endpoint(model, t, sim);
    for (int j = 0; j < model.m; ++j) csv << (j ? "," : "") << "x" << j;
    csv << "\n";
    for (Eigen::Index i = 0; i < batch.samples.rows(); ++i) {
      for (int j = 0; j < model.m; ++j) csv << (j ? "," : "") << num(batch.samples(i, j));
      csv << "\n";
    }
  }
  Run r("simulate", c);
  r.params = {{"t", t}, {"steps", f.steps}, {"simulate", to_json(sim)}};
  r.seed = sim.seed;
  r.write("samples.csv", csv.str());
  r.finish();
  return 0;
}

int cmd_probe(const Common& c, std::optional<double> t_flag) {
  const Json cfg = load(c);
  const OUModel model = load_model(cfg);
  const Json section = cfg.value("probe", Json::object());
  const double t = t_flag ? *t_flag : section.contains("t") ? section["t"].get<double>() : load_run(cfg).t;
  const double p = section.value("p", 2.0);
  std::vector<double> eps = section.contains("eps") ? section["eps"].get<std::vector<double>>()
                                                    : std::vector<double>{1.0 / 5040, 1.0 / 40320, 1.0 / 362880};
  const long mc = section.value("mc_samples", 0L);
  SimConfig sim = sim_config_from_json(section.value("simulate", Json()), load_run(cfg).seed);
  if (c.seed) sim.seed = *c.seed;
  sim.threads = c.threads;

  const LpProbe probe = lp_irregularity_probe(model, t, p, eps, mc, sim);
  std::ostringstream csv;
  csv << "eps,center,lo,hi,bound,bound_ratio,hits,mc_probability,mc_ratio,insufficient\n";
  for (const auto& row : probe.rows) {
    csv << num(row.eps) << "," << num(row.center) << "," << num(row.lo) << "," << num(row.hi) << ","
        << num(row.bound) << "," << num(row.bound_ratio) << "," << row.hits << ","
        << num(row.mc_probability) << "," << num(row.mc_ratio) << "," << (row.insufficient ? 1 : 0) << "\n";
  }
  Run r("probe", c);
  r.params = {{"t", t}, {"p", p}, {"alpha", probe.alpha}, {"eps", eps}, {"mc_samples", mc},
              {"bound_ratio_increasing", probe.bound_ratio_increasing}};
  r.seed = sim.seed;
  r.write("probe.csv", csv.str());
  r.finish();
  std::cout << "alpha = " << num(probe.alpha) << ", bound ratio increasing: "
            << (probe.bound_ratio_increasing ? "yes" : "no") << "\n";
  return 0;
}

int cmd_reproduce(const Common& c, const std::string& id) {
  const auto results = reproduce(id);
  bool all = true;
  std::ostringstream csv;
  csv << "check,pass,detail\n";
  for (const auto& r : results) {
    all = all && r.pass;
    std::printf("%-4s %-45s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    csv << "\"" << r.name << "\"," << (r.pass ? 1 : 0) << ",\"" << r.detail << "\"\n";
  }
  std::printf("%s: %s\n", id.c_str(), all ? "all checks pass" : "some checks failed");
  Run run("reproduce", c);
  run.params = {{"example", id}, {"config", example_config(id)}};
  run.write("reproduce_" + id + ".csv", csv.str());
  run.finish();
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularity analysis, densities and simulation for Levy-driven OU processes"};
  app.set_version_flag("--version", LEVYOU_VERSION);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Config file (JSON)");
    sub->add_option("--out", common.out, "Output directory");
    sub->add_option("--seed", common.seed, "Override run.seed");
    sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--force", common.force, "Proceed past refusals");
  };

  std::optional<double> t_flag;
  auto* analyze = app.add_subcommand("analyze", "Regularity report");
  add_common(analyze);
  analyze->add_option("--t", t_flag, "Time horizon (overrides run.t)");

  CharfnFlags cf;
  auto* charfn_cmd = app.add_subcommand("charfn", "Characteristic function along a direction");
  add_common(charfn_cmd);
  charfn_cmd->add_option("--t", cf.t, "Time horizon");
  charfn_cmd->add_option("--z-min", cf.z_min, "First grid point");
  charfn_cmd->add_option("--z-max", cf.z_max, "Last grid point");
  charfn_cmd->add_option("--points", cf.points, "Number of grid points");
  charfn_cmd->add_flag("--log", cf.log_grid, "Geometric grid");
  charfn_cmd->add_flag("--bounds", cf.bounds, "Add decay bound columns");

  auto* density_cmd = app.add_subcommand("density", "Density by Fourier inversion");
  add_common(density_cmd);
  density_cmd->add_option("--t", t_flag, "Time horizon");

  SimulateFlags sf;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo samples of X(t)");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--t", sf.t, "Time horizon");
  simulate_cmd->add_option("--n", sf.n, "Number of samples");
  simulate_cmd->add_option("--steps", sf.steps, "Write whole paths on this many equal steps");

  auto* probe_cmd = app.add_subcommand("probe", "Lp irregularity probe");
  add_common(probe_cmd);
  probe_cmd->add_option("--t", t_flag, "Time horizon");

  std::string example;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Run the checks of a built-in example");
  add_common(reproduce_cmd);
  reproduce_cmd->add_option("example", example, "example2 | example3 | example4-first | example4-modified | curve-measure")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return cmd_analyze(common, t_flag);
    if (*charfn_cmd) return cmd_charfn(common, cf);
    if (*density_cmd) return cmd_density(common, t_flag);
    if (*simulate_cmd) return cmd_simulate(common, sf);
    if (*probe_cmd) return cmd_probe(common, t_flag);
    if (*reproduce_cmd) return cmd_reproduce(common, example);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
