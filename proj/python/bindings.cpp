#include "levyou/charfn.hpp"
#include "levyou/criteria.hpp"
#include "levyou/density.hpp"
#include "levyou/errors.hpp"
#include "levyou/model.hpp"
#include "levyou/reproduce.hpp"
#include "levyou/simulate.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace levyou;

namespace {

Json to_json(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return Json::parse(obj.cast<std::string>());
  const auto dumps = py::module_::import("json").attr("dumps");
  return Json::parse(dumps(obj).cast<std::string>());
}

py::object from_json(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

struct Model {
  Json config;
  OUModel model;
  RunConfig run;

  explicit Model(const py::object& cfg) : config(to_json(cfg)), model(load_model(config)), run(load_run(config)) {}

  double t_or_default(std::optional<double> t) const { return t ? *t : run.t; }
};

std::vector<Vector> rows_of(const Model& m, const py::array_t<double, py::array::c_style | py::array::forcecast>& z) {
  std::vector<Vector> out;
  if (z.ndim() == 1 && m.model.m == 1) {
    for (py::ssize_t i = 0; i < z.shape(0); ++i) out.push_back(Vector::Constant(1, z.at(i)));
    return out;
  }
  if (z.ndim() == 1 && z.shape(0) == m.model.m) {
    Vector v(m.model.m);
    for (int j = 0; j < m.model.m; ++j) v(j) = z.at(j);
    out.push_back(v);
    return out;
  }
  if (z.ndim() != 2 || z.shape(1) != m.model.m) {
    throw DimensionError("z: expected shape (n, " + std::to_string(m.model.m) + ")");
  }
  for (py::ssize_t i = 0; i < z.shape(0); ++i) {
    Vector v(m.model.m);
    for (int j = 0; j < m.model.m; ++j) v(j) = z.at(i, j);
    out.push_back(v);
  }
  return out;
}

py::array_t<std::complex<double>> evaluate(const Model& m, const py::array_t<double, py::array::c_style | py::array::forcecast>& z,
                                           std::optional<double> t, bool exponent) {
  const auto pts = rows_of(m, z);
  std::vector<std::complex<double>> out(pts.size());
  {
    py::gil_scoped_release release;
    const ExponentEvaluator ev(m.model, m.t_or_default(t));
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = exponent ? ev.psi(pts[i]) : ev.charfn(pts[i]);
  }
  return py::array_t<std::complex<double>>(out.size(), out.data());
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Regularity analysis, densities and simulation for Levy-driven OU processes";

  auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(mod, "ConfigError", base.ptr());
  py::register_exception<DimensionError>(mod, "DimensionError", base.ptr());
  py::register_exception<DomainError>(mod, "DomainError", base.ptr());
  py::register_exception<RefusedError>(mod, "RefusedError", base.ptr());
  py::register_exception<AccuracyError>(mod, "AccuracyError", base.ptr());
  py::register_exception<UnsupportedError>(mod, "UnsupportedError", base.ptr());

  py::class_<Model>(mod, "Model")
      .def(py::init<const py::object&>(), py::arg("config"),
           "Build from a config dict or JSON string with model, measure and run sections.")
      .def_property_readonly("m", [](const Model& m) { return m.model.m; })
      .def_property_readonly("d", [](const Model& m) { return m.model.d; })
      .def_property_readonly("k", [](const Model& m) { return m.model.k; })
      .def_property_readonly("t", [](const Model& m) { return m.run.t; })
      .def_property_readonly("A", [](const Model& m) { return m.model.A; })
      .def_property_readonly("D", [](const Model& m) { return m.model.D; })
      .def("to_dict", [](const Model& m) { return from_json(model_to_json(m.model)); })
      .def(
          "analyze",
          [](const Model& m, std::optional<double> t) {
            const auto opt = report_options_from_json(m.run.tolerances, m.run.seed);
            return from_json(levyou::to_json(assemble_report(m.model, m.t_or_default(t), opt)));
          },
          py::arg("t") = py::none())
      .def(
          "psi", [](const Model& m, const py::array_t<double, py::array::c_style | py::array::forcecast>& z,
                    std::optional<double> t) { return evaluate(m, z, t, true); },
          py::arg("z"), py::arg("t") = py::none())
      .def(
          "charfn", [](const Model& m, const py::array_t<double, py::array::c_style | py::array::forcecast>& z,
                       std::optional<double> t) { return evaluate(m, z, t, false); },
          py::arg("z"), py::arg("t") = py::none())
      .def(
          "gaussian_covariance",
          [](const Model& m, std::optional<double> t) { return gaussian_covariance(m.model, m.t_or_default(t)); },
          py::arg("t") = py::none())
      .def(
          "density",
          [](const Model& m, std::optional<double> t, const py::object& request, bool force) {
            GridRequest req = grid_request_from_json(request.is_none() ? Json() : to_json(request));
            req.force = req.force || force;
            DensityGrid g;
            {
              py::gil_scoped_release release;
              g = m.model.m == 1 ? invert_1d(m.model, m.t_or_default(t), req)
                                 : invert_2d(m.model, m.t_or_default(t), req);
            }
            py::list axes;
            for (int a = 0; a < g.dim; ++a) {
              std::vector<double> x(g.points[a]);
              for (int i = 0; i < g.points[a]; ++i) x[i] = g.coord(a, i);
              axes.append(py::array_t<double>(x.size(), x.data()));
            }
            std::vector<py::ssize_t> shape(g.points.begin(), g.points.end());
            py::array_t<double> values(shape);
            std::copy(g.values.begin(), g.values.end(), values.mutable_data());
            return py::make_tuple(axes, values, from_json(metadata_to_json(g)));
          },
          py::arg("t") = py::none(), py::arg("request") = py::none(), py::arg("force") = false,
          "Returns (axes, values, metadata).")
      .def(
          "simulate",
          [](const Model& m, long n, std::optional<double> t, std::optional<std::uint64_t> seed, int threads) {
            SimConfig cfg = sim_config_from_json(m.config.value("simulate", Json()), m.run.seed);
            cfg.samples = n;
            if (seed) cfg.seed = *seed;
            cfg.threads = threads;
            py::gil_scoped_release release;
            return Matrix(sample_endpoint(m.model, m.t_or_default(t), cfg).samples);
          },
          py::arg("n"), py::arg("t") = py::none(), py::arg("seed") = py::none(), py::arg("threads") = 1);

  mod.def(
      "theorem1_constants",
      [](double A, double t) {
        const auto k = theorem1_constants(A, t);
        py::dict d;
        d["beta"] = k.beta;
        d["C"] = k.C;
        d["C1"] = k.C1;
        d["gamma"] = k.gamma;
        d["C2"] = k.C2;
        d["C3"] = k.C3;
        return d;
      },
      py::arg("A"), py::arg("t"));
  mod.def("example_ids", &example_ids);
  mod.def("example_config", [](const std::string& id) { return from_json(example_config(id)); });
  mod.def("reproduce", [](const std::string& id) {
    py::list out;
    for (const auto& r : reproduce(id)) out.append(py::make_tuple(r.name, r.pass, r.detail));
    return out;
  });
  mod.attr("__version__") = LEVYOU_VERSION;
}
