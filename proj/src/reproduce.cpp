#include "levyou/reproduce.hpp"

#include "levyou/charfn.hpp"
#include "levyou/criteria.hpp"
#include "levyou/density.hpp"
#include "levyou/errors.hpp"
#include "levyou/model.hpp"

#include <cmath>
#include <sstream>

namespace levyou {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Json factorial_measure(const std::string& weight) {
  return Json{{"components", Json::array({Json{{"kind", "factorial_radial"}, {"direction", {1.0}}, {"weight", weight}}})}};
}

Json scalar_config(const std::string& weight) {
  return Json{{"model", {{"m", 1}, {"k", 0}, {"d", 1}, {"A", {{1.0}}}, {"D", {{1.0}}}}},
              {"measure", factorial_measure(weight)},
              {"run", {{"t", 1.0}, {"seed", 1}}}};
}

Json kolmogorov_config(bool modified) {
  const Json a = modified ? Json{{0.0, 1.0}, {1.0, 0.0}} : Json{{1.0, 0.0}, {1.0, 0.0}};
  return Json{{"model", {{"m", 2}, {"k", 0}, {"d", 1}, {"A", a}, {"D", {{1.0}, {0.0}}}}},
              {"measure", factorial_measure("constant")},
              {"run", {{"t", 1.0}, {"seed", 1}}}};
}

Json curve_config() {
  return Json{{"model",
               {{"m", 3}, {"k", 0}, {"d", 3},
                {"A", {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}},
                {"D", {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}}},
              {"measure", {{"components", Json::array({Json{{"kind", "factorial_curve"}, {"weight", "constant"}}})}}},
              {"run", {{"t", 1.0}, {"seed", 1}}}};
}

CheckResult check(std::string name, bool pass, std::string detail) {
  return {std::move(name), pass, std::move(detail)};
}

std::vector<CheckResult> run_example2() {
  const OUModel model = load_model(example_config("example2"));
  std::vector<CheckResult> out;
  const auto diag = condition_iii_diagnostic(model.measure);
  bool increasing = true;
  for (std::size_t i = 1; i < diag.atom_sequence.size(); ++i) {
    increasing = increasing && diag.atom_sequence[i].second > diag.atom_sequence[i - 1].second;
  }
  out.push_back(check("rho(1/N!) increasing, N=5..12", increasing && diag.atom_sequence.size() == 8, ""));
  const double r10 = rho(model.measure, 1.0 / std::tgamma(11.0));
  out.push_back(check("rho(1/10!) = 3.65 +- 0.05", std::abs(r10 - 3.65) <= 0.05, fmt(r10)));
  out.push_back(check("rho trend diverges", diag.cls == LimitClass::diverges, to_string(diag.cls)));
  const auto kal = kallenberg_1d_diagnostic(model.measure);
  out.push_back(check("Kallenberg quotient not diverging", kal.cls != LimitClass::diverges, to_string(kal.cls)));
  const double w5 = singularity_witness(model.measure, 1.0, 5);
  out.push_back(check("witness(N=5) = 0.046 +- 0.002", std::abs(w5 - 0.046) <= 0.002, fmt(w5)));
  const double w500 = singularity_witness(model.measure, 1.0, 500);
  out.push_back(check("witness(N=500) >= 0.95", w500 >= 0.95, fmt(w500)));
  double prev = 0.0;
  bool witness_up = true;
  std::string ws;
  for (int n : {10, 50, 100, 500}) {
    const double w = singularity_witness(model.measure, 1.0, n);
    witness_up = witness_up && w > prev;
    prev = w;
    ws += (ws.empty() ? "" : " ") + fmt(w);
  }
  out.push_back(check("witness increasing over N=10,50,100,500", witness_up, ws));
  const ExponentEvaluator ev(model, 1.0);
  bool dominated = true;
  std::string worst;
  for (int e = 1; e <= 6; ++e) {
    const double z = std::pow(10.0, e);
    const double phi = std::abs(ev.charfn(Vector::Constant(1, z)));
    const double bound = theorem1_bound(model, 1.0, z);
    if (!(phi <= bound)) {
      dominated = false;
      worst = "z=" + fmt(z);
    }
  }
  out.push_back(check("scalar decay bound respected, z=10..1e6", dominated, worst));
  const auto rep = assemble_report(model, 1.0);
  out.push_back(check("density_smooth = yes", rep.density_smooth.value == Tri::yes, rep.density_smooth.rule));
  return out;
}

std::vector<CheckResult> run_example3() {
  const OUModel model = load_model(example_config("example3"));
  std::vector<CheckResult> out;
  const double r10 = rho(model.measure, 1.0 / std::tgamma(11.0));
  out.push_back(check("rho(1/10!) = 0.663 +- 0.01", std::abs(r10 - 0.663) <= 0.01, fmt(r10)));
  const auto diag = condition_iii_diagnostic(model.measure);
  out.push_back(check("rho trend vanishes", diag.cls == LimitClass::vanishes, to_string(diag.cls)));
  out.push_back(check("infinite mass", infinite_mass_check(model.measure).infinite, ""));
  const auto rep = assemble_report(model, 1.0);
  out.push_back(check("density_exists = yes", rep.density_exists.value == Tri::yes, rep.density_exists.rule));
  out.push_back(check("density_smooth = no", rep.density_smooth.value == Tri::no, rep.density_smooth.rule));
  const std::vector<double> eps = {1.0 / std::tgamma(8.0), 1.0 / std::tgamma(9.0), 1.0 / std::tgamma(10.0)};
  const auto probe = lp_irregularity_probe(model, 0.4, 2.0, eps, 0);
  std::string ratios;
  for (const auto& r : probe.rows) ratios += (ratios.empty() ? "" : " ") + fmt(r.bound_ratio);
  out.push_back(check("L2 probe bound ratio increasing (t=0.4)", probe.bound_ratio_increasing, ratios));
  return out;
}

std::vector<CheckResult> run_example4(bool modified) {
  const OUModel model = load_model(example_config(modified ? "example4-modified" : "example4-first"));
  std::vector<CheckResult> out;
  const auto h1 = h1_check(model.A, model.B, model.D);
  const auto h2 = h2_check(model.A, model.D);
  if (!modified) {
    out.push_back(check("H1 holds", h1.holds, "rank " + std::to_string(h1.rank)));
    out.push_back(check("H2 fails", !h2.holds, "rank " + std::to_string(h2.rank)));
  } else {
    out.push_back(check("H2 holds", h2.holds, "rank " + std::to_string(h2.rank)));
    const auto rep = assemble_report(model, 1.0);
    out.push_back(check("density_exists = yes", rep.density_exists.value == Tri::yes, rep.density_exists.rule));
  }
  return out;
}

std::vector<CheckResult> run_curve() {
  std::vector<CheckResult> out;
  const OUModel model = load_model(example_config("curve-measure"));
  const auto y = yamazato_check(model.measure);
  out.push_back(check("Yamazato condition (d=3)", y.holds, "support dim " + std::to_string(y.support.dim())));
  out.push_back(check("essential support is R^3 (d=3)", y.support.dim() == 3, std::to_string(y.support.dim())));
  LevyMeasure plane(2);
  plane.add(FactorialFamily::curve(2, {}));
  const auto s2 = essential_linear_support(plane);
  out.push_back(check("essential support is R^2 (d=2)", s2.dim() == 2, std::to_string(s2.dim())));
  return out;
}

}  // namespace

const std::vector<std::string>& example_ids() {
  static const std::vector<std::string> ids = {"example2", "example3", "example4-first", "example4-modified",
                                               "curve-measure"};
  return ids;
}

Json example_config(const std::string& id) {
  if (id == "example2") return scalar_config("linear");
  if (id == "example3") return scalar_config("constant");
  if (id == "example4-first") return kolmogorov_config(false);
  if (id == "example4-modified") return kolmogorov_config(true);
  if (id == "curve-measure") return curve_config();
  throw ConfigError("reproduce: unknown example id '" + id + "'");
}

std::vector<CheckResult> reproduce(const std::string& id) {
  if (id == "example2") return run_example2();
  if (id == "example3") return run_example3();
  if (id == "example4-first") return run_example4(false);
  if (id == "example4-modified") return run_example4(true);
  if (id == "curve-measure") return run_curve();
  throw ConfigError("reproduce: unknown example id '" + id + "'");
}

}  // namespace levyou
