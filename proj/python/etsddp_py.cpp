/*
 Copyright 2026 The etsddp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "etsddp/chi2.hpp"
#include "etsddp/config.hpp"
#include "etsddp/ellipsoid.hpp"
#include "etsddp/ets.hpp"
#include "etsddp/io.hpp"
#include "etsddp/runner.hpp"
#include "etsddp/synthesis.hpp"
#include "etsddp/vehicle.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace etsddp;

namespace {

// Python dicts travel through the json module; configs and reports are small.
io::json to_json(const py::object& obj) {
  const auto dumps = py::module_::import("json").attr("dumps");
  return io::json::parse(py::cast<std::string>(dumps(obj)));
}

py::object from_json(const io::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

ProjectionMode mode_of(const std::string& name) { return projection_mode_from_string(name); }

RunConfig config_of(const py::object& config) {
  if (py::isinstance<py::str>(config)) return load_run_config(py::cast<std::string>(config));
  return parse_run_config(to_json(config));
}

py::dict solve_dict(const SolveRun& run) {
  io::json doc = io::report_to_json(run.report, run.method);
  if (run.target_set) doc["ellipsoid"] = io::ellipsoid_to_json(*run.target_set);
  py::dict out = from_json(doc);
  std::vector<Eigen::VectorXd> states = run.report.trajectory.states;
  std::vector<Eigen::VectorXd> controls = run.report.trajectory.controls;
  out["states"] = states;
  out["controls"] = controls;
  return out;
}

}  // namespace

PYBIND11_MODULE(_etsddp, m) {
  m.doc() = "Ellipsoidal target set DDP";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SynthesisError>(m, "SynthesisError", PyExc_ValueError);

  py::class_<Ellipsoid>(m, "Ellipsoid")
      .def(py::init<Eigen::VectorXd, Eigen::MatrixXd, double>(), py::arg("center"), py::arg("sigma"),
           py::arg("radius"))
      .def_property_readonly("center", &Ellipsoid::center)
      .def_property_readonly("sigma", &Ellipsoid::shape)
      .def_property_readonly("radius", &Ellipsoid::radius)
      .def_property_readonly("dim", &Ellipsoid::dim)
      .def("to_dict", [](const Ellipsoid& e) { return from_json(io::ellipsoid_to_json(e)); })
      .def_static("from_dict", [](const py::object& d) { return io::ellipsoid_from_json(to_json(d)); })
      .def("__repr__", [](const Ellipsoid& e) {
        return "Ellipsoid(dim=" + std::to_string(e.dim()) + ", radius=" + io::format_double(e.radius()) + ")";
      });

  m.def("mahalanobis", &mahalanobis, py::arg("x"), py::arg("set"));
  m.def("contains", [](const Ellipsoid& e, const Eigen::VectorXd& x) { return contains(e, x); },
        py::arg("set"), py::arg("x"));
  m.def("project",
        [](const Ellipsoid& e, const Eigen::VectorXd& x, const std::string& mode) {
          return project(e, x, mode_of(mode));
        },
        py::arg("set"), py::arg("x"), py::arg("mode") = "consistent");
  m.def("offset_jacobian",
        [](const Ellipsoid& e, const Eigen::VectorXd& x, const std::string& mode) {
          return offset_jacobian(e, x, mode_of(mode));
        },
        py::arg("set"), py::arg("x"), py::arg("mode") = "consistent");

  m.def("chi2_quantile", &chi2_quantile, py::arg("alpha"), py::arg("dof"),
        "Upper-tail quantile: P(X > q) = alpha.");
  m.def("chi2_cdf", &chi2_cdf, py::arg("x"), py::arg("dof"));

  m.def("synthesize",
        [](const std::vector<Eigen::VectorXd>& points, std::vector<bool> accepted, double alpha,
           std::optional<int> min_samples) {
          if (points.empty()) throw ConfigError("points", "need at least one row");
          if (accepted.empty()) accepted.assign(points.size(), true);
          if (accepted.size() != points.size()) throw ConfigError("accepted", "length must match points");
          Dataset data(static_cast<int>(points[0].size()));
          for (std::size_t i = 0; i < points.size(); ++i) data.append({points[i], accepted[i], 0.0});
          SynthesisOptions opts;
          opts.min_samples = min_samples;
          return synthesize_ellipsoid(data, alpha, opts);
        },
        py::arg("points"), py::arg("accepted") = std::vector<bool>{}, py::arg("alpha") = 0.01,
        py::arg("min_samples") = py::none());

  m.def("generate_dataset",
        [](std::size_t count, std::uint64_t seed) {
          const Dataset d = generate_dataset(ProposalSpec::parking_default(), static_cast<int>(count), seed);
          return d.accepted_points();
        },
        py::arg("count"), py::arg("seed"), "Accepted draws from the default parking proposal.");

  m.def("car_step",
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& u) { return vehicle::step(x, u, vehicle::CarParams{}); },
        py::arg("x"), py::arg("u"));

  m.def("solve", [](const py::object& config) { return solve_dict(run_solve(config_of(config))); },
        py::arg("config"), "Runs a solve from a config path or dict and returns the report.");

  m.def("compare",
        [](const py::object& config) {
          const CompareRun run = run_compare(config_of(config));
          py::dict out;
          for (const ComparisonRecord* rec : {&run.result.point, &run.result.ets}) {
            py::dict r;
            r["iterations"] = rec->iterations;
            r["converged"] = rec->converged;
            r["cost"] = rec->comparison_cost;
            r["seconds_per_iteration"] = rec->seconds_per_iteration;
            r["terminal_mahalanobis"] = rec->terminal_mahalanobis;
            out[py::str(rec->method)] = r;
          }
          out["ellipsoid"] = run.target_set;
          return out;
        },
        py::arg("config"));
}
