#include "levyou/criteria.hpp"

#include "levyou/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace levyou {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    default: return "undecided";
  }
}

std::string to_string(Tri v) {
  switch (v) {
    case Tri::yes: return "yes";
    case Tri::no: return "no";
    default: return "undecided";
  }
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "holds") return Verdict::holds;
  if (s == "fails") return Verdict::fails;
  if (s == "undecided") return Verdict::undecided;
  throw ConfigError("unknown verdict '" + s + "'");
}

Tri tri_from_string(const std::string& s) {
  if (s == "yes") return Tri::yes;
  if (s == "no") return Tri::no;
  if (s == "undecided") return Tri::undecided;
  throw ConfigError("unknown conclusion value '" + s + "'");
}

Verdict divergence_verdict(LimitClass c) {
  switch (c) {
    case LimitClass::diverges: return Verdict::holds;
    case LimitClass::vanishes:
    case LimitClass::bounded: return Verdict::fails;
    default: return Verdict::undecided;
  }
}

// ------------------------------------------------------------------ ranks

namespace {

void check_rows(const Matrix& A, const Matrix& X, const char* name) {
  if (A.rows() != A.cols()) throw DimensionError("A: expected a square matrix");
  if (X.size() > 0 && X.rows() != A.rows()) {
    throw DimensionError(std::string(name) + ": expected " + std::to_string(A.rows()) + " rows");
  }
}

/// Appends A^{from}X, …, A^{to}X as column blocks.
void append_powers(std::vector<Matrix>& blocks, const Matrix& A, const Matrix& X, int from, int to) {
  if (X.cols() == 0) return;
  Matrix p = X;
  for (int j = 0; j < from; ++j) p = A * p;
  for (int j = from; j <= to; ++j) {
    blocks.push_back(p);
    p = A * p;
  }
}

RankReport make_rank_report(std::string id, const std::vector<Matrix>& blocks, Eigen::Index m) {
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Matrix block(m, cols);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    block.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  RankReport r;
  r.id = std::move(id);
  r.required = static_cast<int>(m);
  const RankInfo info = rank_info(block);
  r.rank = info.rank;
  r.margin = info.margin;
  r.singular_values = info.singular_values;
  r.holds = r.rank == r.required;
  r.fragile = r.rank > 0 && r.margin < 1e-6;
  r.block = std::move(block);
  return r;
}

}  // namespace

RankReport kalman_check(const Matrix& A, const Matrix& B) {
  check_rows(A, B, "B");
  const int m = static_cast<int>(A.rows());
  std::vector<Matrix> blocks;
  append_powers(blocks, A, B, 0, m - 1);
  return make_rank_report("kalman", blocks, m);
}

RankReport h1_check(const Matrix& A, const Matrix& B, const Matrix& D) {
  check_rows(A, B, "B");
  check_rows(A, D, "D");
  const int m = static_cast<int>(A.rows());
  std::vector<Matrix> blocks;
  append_powers(blocks, A, B, 0, m - 1);
  append_powers(blocks, A, D, 0, m - 1);
  return make_rank_report("H1", blocks, m);
}

RankReport h2_check(const Matrix& A, const Matrix& D) {
  check_rows(A, D, "D");
  const int m = static_cast<int>(A.rows());
  std::vector<Matrix> blocks;
  append_powers(blocks, A, D, 1, m);
  return make_rank_report("H2", blocks, m);
}

RankReport h2prime_check(const Matrix& A, const Matrix& B, const Matrix& D) {
  check_rows(A, B, "B");
  check_rows(A, D, "D");
  const int m = static_cast<int>(A.rows());
  std::vector<Matrix> blocks;
  append_powers(blocks, A, B, 0, m - 1);
  append_powers(blocks, A, D, 1, m);
  return make_rank_report("H2prime", blocks, m);
}

// ------------------------------------------------------------ measure tests

MassReport infinite_mass_check(const LevyMeasure& pi, std::optional<double> t) {
  MassReport r;
  r.infinite = pi.infinite_mass();
  r.total_mass = pi.total_mass();
  if (!r.infinite && t) r.atom_mass = std::exp(-*t * r.total_mass);
  return r;
}

namespace {

double inv_factorial_double(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return 1.0 / f;
}

LimitDiagnostic limit_diagnostic(const LevyMeasure& pi, const LimitThresholds& th,
                                 const std::function<double(double)>& f, const char* what) {
  if (pi.dim() != 1) throw DomainError(std::string(what) + ": defined for d = 1");
  LimitDiagnostic out;
  out.dyadic = dyadic_profile(f, th);
  out.factorial = factorial_envelope_profile(pi, f, th);
  out.cls = out.dyadic.cls;
  if (out.factorial.grid == "factorial") {
    out.cls = out.factorial.cls;
    for (int n = 5; n <= 12; ++n) out.atom_sequence.emplace_back(n, f(std::log(inv_factorial_double(n))));
  }
  return out;
}

}  // namespace

LimitDiagnostic condition_iii_diagnostic(const LevyMeasure& pi, const LimitThresholds& th) {
  return limit_diagnostic(pi, th, [&](double le) { return rho_log(pi, le); },
                          "clipped second-moment growth");
}

LimitDiagnostic kallenberg_1d_diagnostic(const LevyMeasure& pi, const LimitThresholds& th) {
  return limit_diagnostic(pi, th, [&](double le) { return kallenberg_ratio_log(pi, le); },
                          "small-jump second-moment growth");
}

SphereInfimum directional_infimum(const LevyMeasure& pi, double eps, const SphereSampling& s) {
  const Eigen::Index d = pi.dim();
  auto value = [&](const Vector& l) { return directional_truncated_moment(pi, l, eps); };
  if (d == 1) {
    Vector l = Vector::Constant(1, 1.0);
    return {value(l), l};
  }
  std::mt19937_64 gen(s.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  auto random_unit = [&] {
    Vector v(d);
    do {
      for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(gen);
    } while (v.norm() == 0.0);
    return Vector(v.normalized());
  };
  SphereInfimum best{std::numeric_limits<double>::infinity(), Vector::Unit(d, 0)};
  auto consider = [&](const Vector& l) {
    const double v = value(l);
    if (v < best.value) best = {v, l};
  };
  for (Eigen::Index i = 0; i < d; ++i) consider(Vector::Unit(d, i));
  for (int i = 0; i < s.samples; ++i) consider(random_unit());
  double radius = 0.1;
  for (int round = 0; round < s.refine_rounds; ++round) {
    const Vector centre = best.direction;
    for (int i = 0; i < s.refine_draws; ++i) {
      Vector l = centre + radius * random_unit();
      if (l.norm() == 0.0) continue;
      consider(l.normalized());
    }
    radius *= 0.3;
  }
  return best;
}

DirectionalDiagnostic condition32_diagnostic(const LevyMeasure& pi, const SphereSampling& s,
                                             const LimitThresholds& th) {
  DirectionalDiagnostic out;
  Vector worst;
  out.profile = dyadic_profile(
      [&](double le) {
        const double eps = std::exp(le);
        const SphereInfimum inf = directional_infimum(pi, eps, s);
        worst = inf.direction;
        return inf.value / (eps * eps * -le);
      },
      th);
  out.cls = out.profile.cls;
  out.worst_direction = worst;
  return out;
}

HypoellipticMass hypoellipticity_mass(const LevyMeasure& pi, const Matrix& A, const Matrix& D,
                                      const Vector& l, int n_tail, double tol) {
  const Eigen::Index m = A.rows();
  if (std::abs(l.norm() - 1.0) > 1e-10) throw DomainError("hypoellipticity_mass: l must be a unit vector");
  if (l.size() != m || D.rows() != m || D.cols() != pi.dim()) {
    throw DimensionError("hypoellipticity_mass: shapes of A, D, l and the measure disagree");
  }
  // g_j = (A^j D)ᵀ l; u qualifies when some |(g_j, u)| is non-negligible.
  std::vector<Vector> g;
  double scale = 0.0;
  Matrix p = A * D;
  for (Eigen::Index j = 1; j <= m; ++j) {
    g.push_back(p.transpose() * l);
    scale = std::max(scale, op_norm(p));
    p = A * p;
  }
  HypoellipticMass out;
  if (scale == 0.0) return out;
  auto qualifies = [&](const Vector& u) {
    const double un = u.norm();
    for (const auto& gj : g) {
      if (std::abs(gj.dot(u)) > tol * scale * un) return true;
    }
    return false;
  };
  for (const auto& c : pi.components()) {
    if (c->is_atomic()) {
      const auto atoms = c->atoms(n_tail);
      for (const auto& a : atoms) {
        if (qualifies(a.point)) out.mass += a.weight;
      }
      if (c->infinite_mass() && !atoms.empty() && qualifies(atoms.back().point)) out.infinite = true;
      continue;
    }
    const auto& r = dynamic_cast<const RadialDensity&>(*c);
    const double mass = r.infinite_mass() ? std::numeric_limits<double>::infinity()
                                          : r.radial_moment(0.0, 0.0, r.support_radius());
    if (r.directions().uniform) {
      bool any = false;
      for (const auto& gj : g) any = any || gj.norm() > tol * scale;
      if (any) {
        if (r.infinite_mass()) out.infinite = true; else out.mass += mass;
      }
    } else {
      const auto& dirs = r.directions();
      for (std::size_t i = 0; i < dirs.vectors.size(); ++i) {
        if (!qualifies(dirs.vectors[i])) continue;
        if (r.infinite_mass()) out.infinite = true; else out.mass += dirs.probs[i] * mass;
      }
    }
  }
  if (out.infinite) out.mass = std::numeric_limits<double>::infinity();
  return out;
}

// ----------------------------------------------------------------- report

const ReportEntry* RegularityReport::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::string RegularityReport::summary() const {
  std::ostringstream os;
  os << "t = " << t << "\n";
  for (const auto& e : entries) os << "  " << e.id << ": " << to_string(e.verdict) << "\n";
  auto line = [&](const char* name, const Conclusion& c) {
    os << name << ": " << to_string(c.value);
    if (!c.rule.empty()) os << " (" << c.rule << ")";
    os << "\n";
  };
  line("density_exists", density_exists);
  line("density_smooth", density_smooth);
  line("schwartz_class", schwartz);
  return os.str();
}

namespace {

Json profile_to_json(const GrowthProfile& p) {
  Json values = Json::array();
  for (double v : p.values) values.push_back(real_to_json(v));
  return {{"grid", p.grid},
          {"log_inv_eps", p.log_inv_eps},
          {"values", values},
          {"slope", real_to_json(p.slope)},
          {"class", to_string(p.cls)}};
}

Json rank_evidence(const RankReport& r) {
  return {{"rank", r.rank},
          {"required", r.required},
          {"margin", r.margin},
          {"fragile", r.fragile},
          {"block_shape", {r.block.rows(), r.block.cols()}},
          {"singular_values", vector_to_json(r.singular_values)}};
}

Json limit_evidence(const LimitDiagnostic& d) {
  Json seq = Json::array();
  for (const auto& [n, v] : d.atom_sequence) seq.push_back({{"N", n}, {"value", real_to_json(v)}});
  return {{"class", to_string(d.cls)},
          {"dyadic", profile_to_json(d.dyadic)},
          {"factorial", profile_to_json(d.factorial)},
          {"atom_sequence", seq}};
}

Json conclusion_to_json(const Conclusion& c) {
  return {{"value", to_string(c.value)}, {"rule", c.rule}, {"evidence", c.evidence}};
}

Conclusion conclusion_from_json(const Json& j) {
  Conclusion c;
  c.value = tri_from_string(j.at("value").get<std::string>());
  c.rule = j.value("rule", std::string());
  c.evidence = j.value("evidence", std::vector<std::string>{});
  return c;
}

Conclusion yes(std::string rule, std::vector<std::string> evidence) {
  return {Tri::yes, std::move(rule), std::move(evidence)};
}
Conclusion no(std::string rule, std::vector<std::string> evidence) {
  return {Tri::no, std::move(rule), std::move(evidence)};
}

}  // namespace

RegularityReport assemble_report(const OUModel& model, double t, const ReportOptions& opt) {
  if (!(t > 0.0)) throw DomainError("assemble_report: t must be positive");
  validate(model);
  const LevyMeasure& pi = model.measure;
  RegularityReport rep;
  rep.t = t;
  auto add = [&](std::string id, Verdict v, Json ev) {
    rep.entries.push_back({std::move(id), v, std::move(ev)});
  };

  const RankReport kalman = kalman_check(model.A, model.B);
  const RankReport h1 = h1_check(model.A, model.B, model.D);
  const RankReport h2 = h2_check(model.A, model.D);
  const RankReport h2p = h2prime_check(model.A, model.B, model.D);
  for (const auto* r : {&kalman, &h1, &h2, &h2p}) {
    add(r->id, r->holds ? Verdict::holds : Verdict::fails, rank_evidence(*r));
  }

  const MassReport mass = infinite_mass_check(pi, t);
  {
    Json ev = {{"total_mass", real_to_json(mass.total_mass)}};
    if (mass.atom_mass) ev["atom_mass"] = *mass.atom_mass;
    add("infinite_mass", mass.infinite ? Verdict::holds : Verdict::fails, ev);
  }

  const YamazatoResult yam = yamazato_check(pi);
  add("yamazato", yam.holds ? Verdict::holds : Verdict::fails,
      {{"support_dim", yam.support.dim()}, {"support_basis", matrix_to_json(yam.support.basis())}});

  std::optional<LimitDiagnostic> iii;
  if (model.d == 1) {
    iii = condition_iii_diagnostic(pi, opt.thresholds);
    add("clipped_second_moment_growth", divergence_verdict(iii->cls), limit_evidence(*iii));
    const LimitDiagnostic kal = kallenberg_1d_diagnostic(pi, opt.thresholds);
    add("kallenberg", divergence_verdict(kal.cls), limit_evidence(kal));
  }

  const DirectionalDiagnostic c32 = condition32_diagnostic(pi, opt.sphere, opt.thresholds);
  add("directional_small_jump_growth", divergence_verdict(c32.cls),
      {{"class", to_string(c32.cls)},
       {"profile", profile_to_json(c32.profile)},
       {"worst_direction", vector_to_json(c32.worst_direction)}});

  {
    // Jump-span mass over sampled unit l (plus coordinate axes).
    std::mt19937_64 gen(opt.sphere.seed + 17);
    std::normal_distribution<double> normal;
    std::vector<Vector> ls;
    for (int i = 0; i < model.m; ++i) ls.push_back(Vector::Unit(model.m, i));
    for (int i = 0; model.m > 1 && i < opt.hypoelliptic_samples; ++i) {
      Vector v(model.m);
      for (int j = 0; j < model.m; ++j) v(j) = normal(gen);
      if (v.norm() > 0.0) ls.push_back(v.normalized());
    }
    bool all_infinite = true;
    double worst_mass = std::numeric_limits<double>::infinity();
    Vector worst_l = ls.front();
    for (const auto& l : ls) {
      const HypoellipticMass hm = hypoellipticity_mass(pi, model.A, model.D, l, pi.n_max());
      if (!hm.infinite) {
        all_infinite = false;
        if (hm.mass < worst_mass) {
          worst_mass = hm.mass;
          worst_l = l;
        }
      }
    }
    add("hypoelliptic_jump_mass", all_infinite ? Verdict::holds : Verdict::fails,
        {{"directions_sampled", ls.size()},
         {"worst_direction", vector_to_json(worst_l)},
         {"worst_mass", real_to_json(worst_mass)}});
  }

  bool moments_finite = true;
  {
    Json vals = Json::array();
    for (int n = 1; n <= opt.moment_n_max; ++n) {
      const double v = moment_above_one(pi, n);
      vals.push_back(real_to_json(v));
      moments_finite = moments_finite && std::isfinite(v);
    }
    add("moment_above_one", moments_finite ? Verdict::holds : Verdict::fails,
        {{"n_max", opt.moment_n_max}, {"moments", vals}});
  }

  // Conclusions.
  const bool gaussian = model.has_gaussian();
  const bool scalar_route = model.m == 1 && model.d == 1 && !gaussian && model.A(0, 0) != 0.0 &&
                            model.D(0, 0) != 0.0;
  const bool noise_inert = !gaussian && (!mass.infinite || model.D.norm() == 0.0);

  if (noise_inert) {
    if (model.D.norm() == 0.0 || pi.is_zero()) {
      rep.density_exists = no("degenerate_noise", {"infinite_mass"});
    } else {
      rep.density_exists = no("finite_jump_mass_atom", {"infinite_mass"});
    }
    rep.density_smooth = no("no_density", {});
  } else {
    if (h1.holds && c32.cls == LimitClass::diverges) {
      rep.density_smooth = yes("H1_and_directional_growth", {"H1", "directional_small_jump_growth"});
    } else if (model.m == 1 && gaussian) {
      rep.density_smooth = yes("scalar_gaussian_component", {"kalman"});
    } else if (scalar_route && iii && iii->cls == LimitClass::diverges) {
      rep.density_smooth = yes("scalar_clipped_growth", {"clipped_second_moment_growth"});
    } else if (scalar_route && iii && iii->cls == LimitClass::vanishes) {
      rep.density_smooth = no("scalar_clipped_decay", {"clipped_second_moment_growth"});
    }

    if (h2.holds && yam.holds) {
      rep.density_exists = yes("H2_and_yamazato", {"H2", "yamazato"});
    } else if (scalar_route && mass.infinite) {
      rep.density_exists = yes("scalar_infinite_mass", {"infinite_mass"});
    } else if (rep.density_smooth.value == Tri::yes) {
      rep.density_exists = yes("smooth_implies_exists", {rep.density_smooth.rule});
    }
  }

  if (rep.density_smooth.rule == "H1_and_directional_growth" && moments_finite) {
    rep.schwartz = yes("H1_directional_growth_and_moments",
                       {"H1", "directional_small_jump_growth", "moment_above_one"});
  } else if (rep.density_smooth.value == Tri::no) {
    rep.schwartz = no("not_smooth", {});
  }
  return rep;
}

Json to_json(const RegularityReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"id", e.id}, {"verdict", to_string(e.verdict)}, {"evidence", e.evidence}});
  }
  return {{"schema_version", r.schema_version},
          {"t", r.t},
          {"entries", entries},
          {"conclusions",
           {{"density_exists", conclusion_to_json(r.density_exists)},
            {"density_smooth", conclusion_to_json(r.density_smooth)},
            {"schwartz_class", conclusion_to_json(r.schwartz)}}}};
}

RegularityReport report_from_json(const Json& j) {
  RegularityReport r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != RegularityReport::kSchemaVersion) {
    throw ConfigError("report: unsupported schema_version " + std::to_string(r.schema_version));
  }
  r.t = j.at("t").get<double>();
  for (const auto& e : j.at("entries")) {
    r.entries.push_back({e.at("id").get<std::string>(),
                         verdict_from_string(e.at("verdict").get<std::string>()),
                         e.value("evidence", Json::object())});
  }
  const Json& c = j.at("conclusions");
  r.density_exists = conclusion_from_json(c.at("density_exists"));
  r.density_smooth = conclusion_from_json(c.at("density_smooth"));
  r.schwartz = conclusion_from_json(c.at("schwartz_class"));
  return r;
}

ReportOptions report_options_from_json(const Json& tol, std::uint64_t seed) {
  ReportOptions o;
  o.sphere.seed = seed;
  if (!tol.is_object()) return o;
  o.thresholds.diverge_min = tol.value("diverge_min", o.thresholds.diverge_min);
  o.thresholds.vanish_max = tol.value("vanish_max", o.thresholds.vanish_max);
  o.thresholds.tail = tol.value("tail", o.thresholds.tail);
  o.thresholds.bounded_slope = tol.value("bounded_slope", o.thresholds.bounded_slope);
  o.sphere.samples = tol.value("sphere_samples", o.sphere.samples);
  o.moment_n_max = tol.value("moment_n_max", o.moment_n_max);
  return o;
}

}  // namespace levyou
