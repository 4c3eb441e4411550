#include "levyou/model.hpp"

#include "levyou/errors.hpp"
#include "levyou/quadrature.hpp"

#include <cmath>
#include <limits>

namespace levyou {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void expect_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string("model.") + name + ": expected " + std::to_string(rows) +
                         "x" + std::to_string(cols) + ", got " + shape(m));
  }
  require_finite(m, name);
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(where + "." + key + ": missing");
  }
  return obj.at(key);
}

int positive_int(const Json& obj, const char* key, const std::string& where) {
  const Json& j = field(obj, key, where);
  if (!j.is_number_integer() || j.get<long>() < 0) {
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
  }
  return j.get<int>();
}

WeightRule parse_weight(const Json& c, const std::string& where) {
  WeightRule w;
  if (!c.contains("weight")) return w;
  const Json& j = c.at("weight");
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "constant") w.kind = WeightRule::Kind::constant;
    else if (s == "linear") w.kind = WeightRule::Kind::linear;
    else throw ConfigError(where + ".weight: expected 'constant' or 'linear'");
    return w;
  }
  if (j.is_number()) {
    w.c = j.get<double>();
    return w;
  }
  const auto rule = j.value("rule", std::string("constant"));
  if (rule == "constant") w.kind = WeightRule::Kind::constant;
  else if (rule == "linear") w.kind = WeightRule::Kind::linear;
  else throw ConfigError(where + ".weight.rule: expected 'constant' or 'linear'");
  w.c = real_from_json(j.value("c", Json(1.0)), where + ".weight.c");
  return w;
}

Json weight_to_json(const WeightRule& w) {
  return {{"rule", w.kind == WeightRule::Kind::constant ? "constant" : "linear"}, {"c", w.c}};
}

RadialDensity::Directions parse_directions(const Json& c, Eigen::Index d,
                                           const std::string& where) {
  RadialDensity::Directions dirs;
  if (!c.contains("directions")) return dirs;
  const Json& j = c.at("directions");
  if (j.is_string()) {
    if (j.get<std::string>() != "uniform") {
      throw ConfigError(where + ".directions: expected 'uniform' or {vectors, weights}");
    }
    return dirs;
  }
  dirs.uniform = false;
  const Json& vecs = field(j, "vectors", where + ".directions");
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    Vector v = vector_from_json(vecs[i], where + ".directions.vectors");
    if (v.size() != d) {
      throw DimensionError(where + ".directions.vectors[" + std::to_string(i) +
                           "]: expected length " + std::to_string(d));
    }
    dirs.vectors.push_back(std::move(v));
  }
  if (j.contains("weights")) {
    for (const auto& w : j.at("weights")) dirs.probs.push_back(real_from_json(w, where));
  } else {
    dirs.probs.assign(dirs.vectors.size(), 1.0);
  }
  return dirs;
}

Json directions_to_json(const RadialDensity::Directions& dirs) {
  if (dirs.uniform) return "uniform";
  Json vecs = Json::array();
  for (const auto& v : dirs.vectors) vecs.push_back(vector_to_json(v));
  return {{"vectors", vecs}, {"weights", dirs.probs}};
}

std::shared_ptr<const MeasureComponent> parse_component(const Json& c, Eigen::Index d,
                                                        const std::string& where) {
  const auto kind = field(c, "kind", where).get<std::string>();
  if (kind == "atoms") {
    const Json& pts = field(c, "points", where);
    std::vector<Vector> points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Vector p = vector_from_json(pts[i], where + ".points");
      if (p.size() != d) {
        throw DimensionError(where + ".points[" + std::to_string(i) + "]: expected length " +
                             std::to_string(d) + ", got " + std::to_string(p.size()));
      }
      points.push_back(std::move(p));
    }
    std::vector<double> weights;
    if (c.contains("weights")) {
      for (const auto& w : c.at("weights")) weights.push_back(real_from_json(w, where + ".weights"));
    } else {
      weights.assign(points.size(), 1.0);
    }
    return std::make_shared<const ExplicitAtoms>(std::move(points), std::move(weights));
  }
  if (kind == "factorial_radial") {
    Vector dir = c.contains("direction") ? vector_from_json(c.at("direction"), where + ".direction")
                                         : Vector(Vector::Unit(d, 0));
    if (dir.size() != d) throw DimensionError(where + ".direction: expected length " + std::to_string(d));
    return std::make_shared<const FactorialFamily>(
        FactorialFamily::radial(std::move(dir), parse_weight(c, where)));
  }
  if (kind == "factorial_curve") {
    Matrix basis = c.contains("basis") ? matrix_from_json(c.at("basis"), where + ".basis") : Matrix();
    return std::make_shared<const FactorialFamily>(
        FactorialFamily::curve(d, parse_weight(c, where), std::move(basis)));
  }
  if (kind == "power_law") {
    const double cc = real_from_json(c.value("c", Json(1.0)), where + ".c");
    const double alpha = real_from_json(field(c, "alpha", where), where + ".alpha");
    const double r_max = c.contains("r_max") && !c.at("r_max").is_null()
                             ? real_from_json(c.at("r_max"), where + ".r_max")
                             : std::numeric_limits<double>::infinity();
    return std::make_shared<const RadialDensity>(
        RadialDensity::power_law(d, cc, alpha, r_max, parse_directions(c, d, where)));
  }
  if (kind == "tabulated") {
    std::vector<double> knots, values;
    for (const auto& x : field(c, "knots", where)) knots.push_back(real_from_json(x, where + ".knots"));
    for (const auto& x : field(c, "values", where)) values.push_back(real_from_json(x, where + ".values"));
    return std::make_shared<const RadialDensity>(
        RadialDensity::tabulated(d, std::move(knots), std::move(values), parse_directions(c, d, where)));
  }
  throw ConfigError(where + ".kind: unknown component kind '" + kind + "'");
}

Json component_to_json(const MeasureComponent& c) {
  if (const auto* a = dynamic_cast<const ExplicitAtoms*>(&c)) {
    Json pts = Json::array();
    Json ws = Json::array();
    for (const auto& atom : a->atoms(0)) {
      pts.push_back(vector_to_json(atom.point));
      ws.push_back(atom.weight);
    }
    return {{"kind", "atoms"}, {"points", pts}, {"weights", ws}};
  }
  if (const auto* f = dynamic_cast<const FactorialFamily*>(&c)) {
    Json out = {{"kind", f->kind()}, {"weight", weight_to_json(f->weight())}};
    if (f->shape() == FactorialFamily::Shape::radial) {
      out["direction"] = vector_to_json(f->direction());
    } else {
      out["basis"] = matrix_to_json(f->basis());
    }
    return out;
  }
  const auto& r = dynamic_cast<const RadialDensity&>(c);
  if (r.kind() == "power_law") {
    const auto& s = r.segments().front();
    return {{"kind", "power_law"},
            {"c", s.coef},
            {"alpha", r.alpha()},
            {"r_max", real_to_json(s.r_hi)},
            {"directions", directions_to_json(r.directions())}};
  }
  Json knots = Json::array();
  Json values = Json::array();
  for (const auto& s : r.segments()) {
    knots.push_back(s.r_lo);
    values.push_back(s.coef * std::pow(s.r_lo, s.p));
  }
  const auto& last = r.segments().back();
  knots.push_back(last.r_hi);
  values.push_back(last.coef * std::pow(last.r_hi, last.p));
  return {{"kind", "tabulated"},
          {"knots", knots},
          {"values", values},
          {"directions", directions_to_json(r.directions())}};
}

}  // namespace

void validate(const OUModel& model) {
  if (model.m < 1) throw DimensionError("model.m: must be positive");
  if (model.d < 1) throw DimensionError("model.d: must be positive");
  if (model.k < 0) throw DimensionError("model.k: must be non-negative");
  expect_shape(model.A, model.m, model.m, "A");
  expect_shape(model.B, model.m, model.k, "B");
  expect_shape(model.D, model.m, model.d, "D");
  expect_shape(model.a, model.m, 1, "a");
  expect_shape(model.x0, model.m, 1, "x0");
  if (model.measure.dim() != model.d) {
    throw DimensionError("measure: dimension " + std::to_string(model.measure.dim()) +
                         " does not match model.d = " + std::to_string(model.d));
  }
}

OUModel make_model(Matrix A, Matrix B, Matrix D, LevyMeasure measure, Vector a, Vector x0) {
  OUModel model;
  model.m = static_cast<int>(A.rows());
  model.d = static_cast<int>(D.cols());
  if (B.size() == 0) B = Matrix::Zero(model.m, 0);
  model.k = static_cast<int>(B.cols());
  model.A = std::move(A);
  model.B = std::move(B);
  model.D = std::move(D);
  model.a = a.size() == 0 ? Vector(Vector::Zero(model.m)) : std::move(a);
  model.x0 = x0.size() == 0 ? Vector(Vector::Zero(model.m)) : std::move(x0);
  model.measure = std::move(measure);
  validate(model);
  return model;
}

LevyMeasure load_measure(const Json& doc, Eigen::Index d) {
  const int n_max = doc.is_object() ? doc.value("n_max", 30) : 30;
  LevyMeasure pi(d, n_max);
  if (doc.is_null()) return pi;
  const Json& comps = doc.is_array() ? doc : doc.value("components", Json::array());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string where = "measure.components[" + std::to_string(i) + "]";
    pi.add(parse_component(comps[i], d, where));
  }
  return pi;
}

Json measure_to_json(const LevyMeasure& pi) {
  Json comps = Json::array();
  for (const auto& c : pi.components()) comps.push_back(component_to_json(*c));
  return {{"components", comps}, {"n_max", pi.n_max()}};
}

OUModel load_model(const Json& config) {
  const Json& mj = field(config, "model", "config");
  OUModel model;
  model.m = positive_int(mj, "m", "model");
  model.d = positive_int(mj, "d", "model");
  model.k = mj.contains("k") ? positive_int(mj, "k", "model") : 0;
  model.A = matrix_from_json(field(mj, "A", "model"), "model.A");
  model.D = matrix_from_json(field(mj, "D", "model"), "model.D");
  if (mj.contains("B") && !mj.at("B").is_null()) {
    model.B = matrix_from_json(mj.at("B"), "model.B");
    if (model.B.size() == 0) model.B = Matrix::Zero(model.m, model.k);
  } else {
    model.B = Matrix::Zero(model.m, model.k);
  }
  model.a = mj.contains("a") ? vector_from_json(mj.at("a"), "model.a") : Vector(Vector::Zero(model.m));
  model.x0 = mj.contains("x0") ? vector_from_json(mj.at("x0"), "model.x0") : Vector(Vector::Zero(model.m));
  model.measure = load_measure(config.value("measure", Json()), model.d);
  validate(model);
  return model;
}

Json model_to_json(const OUModel& model) {
  return {{"model",
           {{"m", model.m},
            {"k", model.k},
            {"d", model.d},
            {"A", matrix_to_json(model.A)},
            {"B", matrix_to_json(model.B)},
            {"D", matrix_to_json(model.D)},
            {"a", vector_to_json(model.a)},
            {"x0", vector_to_json(model.x0)}}},
          {"measure", measure_to_json(model.measure)}};
}

RunConfig load_run(const Json& config) {
  RunConfig run;
  if (!config.contains("run")) return run;
  const Json& r = config.at("run");
  if (r.contains("t")) run.t = real_from_json(r.at("t"), "run.t");
  if (!(run.t > 0.0) || !std::isfinite(run.t)) throw ConfigError("run.t: must be positive");
  if (r.contains("seed")) {
    if (!r.at("seed").is_number_integer()) throw ConfigError("run.seed: expected an integer");
    run.seed = r.at("seed").get<std::uint64_t>();
  }
  if (r.contains("tolerances")) run.tolerances = r.at("tolerances");
  return run;
}

Matrix gaussian_covariance(const OUModel& model, double t, double rel_tol) {
  if (!(t >= 0.0)) throw DomainError("gaussian_covariance: t must be >= 0");
  const Eigen::Index m = model.m;
  if (t == 0.0 || !model.has_gaussian()) return Matrix::Zero(m, m);
  const Matrix bbt = model.B * model.B.transpose();
  auto integrate = [&](int panels) {
    std::vector<double> x, w;
    composite_nodes<16>(0.0, t, panels, x, w);
    Matrix s = Matrix::Zero(m, m);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Matrix e = expm(x[i] * model.A);
      s += w[i] * e * bbt * e.transpose();
    }
    return s;
  };
  int panels = std::max(1, static_cast<int>(std::ceil(t * op_norm(model.A))));
  Matrix prev = integrate(panels);
  for (int iter = 0; iter < 16; ++iter) {
    panels *= 2;
    Matrix next = integrate(panels);
    const double change = (next - prev).norm();
    if (change <= rel_tol * next.norm()) {
      return 0.5 * (next + next.transpose());
    }
    prev = std::move(next);
  }
  throw AccuracyError("gaussian_covariance: panel doubling did not converge",
                      (prev).norm());
}

Vector deterministic_part(const OUModel& model, double t) {
  Vector out = expm(t * model.A) * model.x0;
  if (model.a.size() > 0 && model.a.norm() > 0.0) out += integrated_propagator(model.A, t) * model.a;
  return out;
}

}  // namespace levyou
