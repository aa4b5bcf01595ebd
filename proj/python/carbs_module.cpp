/*
 * Copyright 2026 The CARBS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "carbs/acquisition.hpp"
#include "carbs/harness/bench.hpp"
#include "carbs/harness/config.hpp"
#include "carbs/normal.hpp"
#include "carbs/optimizer.hpp"
#include "carbs/pareto.hpp"
#include "carbs/scaling.hpp"
#include "carbs/warp.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace carbs;

namespace {

py::dict suggestion_to_dict(const Suggestion& s) {
  py::dict d;
  d["suggestion_id"] = s.suggestion_id;
  d["params"] = s.params;
  d["is_resample"] = s.is_resample;
  d["kind"] = std::string(to_string(s.metadata.kind));
  d["cost_ceiling_fallback"] = s.metadata.cost_ceiling_fallback;
  if (s.metadata.scored) {
    d["predicted_cost"] = s.metadata.scored->predicted_cost;
    d["score"] = s.metadata.scored->score;
  }
  return d;
}

py::list front_to_list(const ParetoSet& front) {
  py::list out;
  for (const auto& m : front.members) {
    py::dict d;
    d["params"] = m.key;
    d["output"] = m.effective_output();
    d["mean_output"] = m.mean_output;
    d["cost"] = m.mean_cost;
    d["count"] = m.count();
    out.append(d);
  }
  return out;
}

std::vector<OutputCost> to_points(const std::vector<double>& outputs, const std::vector<double>& costs) {
  if (outputs.size() != costs.size()) throw std::invalid_argument("outputs and costs differ in length");
  std::vector<OutputCost> pts(outputs.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {outputs[i], costs[i]};
  return pts;
}

OptimizerConfig make_config(const SearchSpace& space, const py::kwargs& kw) {
  OptimizerConfig c;
  c.space = space;
  for (const auto& [k, v] : kw) {
    const auto key = py::cast<std::string>(k);
    if (key == "sigma_search") c.sigma_search = py::cast<double>(v);
    else if (key == "n_cand") c.n_cand = py::cast<std::size_t>(v);
    else if (key == "max_candidates") c.max_candidates = py::cast<std::size_t>(v);
    else if (key == "n_resample") c.n_resample = py::cast<std::size_t>(v);
    else if (key == "c_max") c.c_max = py::cast<double>(v);
    else if (key == "acquisition_mode") c.acquisition_mode = parse_acquisition_mode(py::cast<std::string>(v));
    else if (key == "resampling_enabled") c.resampling_enabled = py::cast<bool>(v);
    else if (key == "n_init") c.n_init = py::cast<std::size_t>(v);
    else if (key == "seed") c.seed = py::cast<std::uint64_t>(v);
    else if (key == "model_log_cost") c.model_log_cost = py::cast<bool>(v);
    else throw py::key_error("unknown optimizer option '" + key + "'");
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cost-aware Bayesian hyperparameter optimizer";

  py::register_exception<ObserveError>(m, "ObserveError", PyExc_ValueError);
  py::register_exception<SnapshotError>(m, "SnapshotError", PyExc_ValueError);
  py::register_exception<SpaceError>(m, "SpaceError", PyExc_ValueError);

  py::enum_<SpaceType>(m, "SpaceType")
      .value("LOG", SpaceType::Log)
      .value("LOGIT", SpaceType::Logit)
      .value("LINEAR", SpaceType::Linear);

  py::class_<ParamSpec>(m, "ParamSpec")
      .def(py::init([](std::string name, const std::string& space_type, double search_center,
                       double min, double max, bool is_integer, double scale) {
             ParamSpec s{std::move(name), parse_space_type(space_type), search_center, min, max,
                         is_integer, scale};
             s.validate();
             return s;
           }),
           py::arg("name"), py::arg("space_type"), py::arg("search_center"),
           py::arg("min") = -kInfinity, py::arg("max") = kInfinity, py::arg("is_integer") = false,
           py::arg("scale") = 1.0)
      .def_readonly("name", &ParamSpec::name)
      .def_property_readonly("space_type", [](const ParamSpec& s) { return std::string(to_string(s.space_type)); })
      .def_readonly("search_center", &ParamSpec::search_center)
      .def_readonly("min", &ParamSpec::min_bound)
      .def_readonly("max", &ParamSpec::max_bound)
      .def_readonly("is_integer", &ParamSpec::is_integer)
      .def_readonly("scale", &ParamSpec::scale);

  py::class_<SearchSpace>(m, "SearchSpace")
      .def(py::init<std::vector<ParamSpec>>(), py::arg("specs"))
      .def_property_readonly("dimension", &SearchSpace::dimension)
      .def_property_readonly("names", &SearchSpace::names)
      .def("to_basic", &SearchSpace::to_basic, py::arg("params"))
      .def("from_basic", &SearchSpace::from_basic, py::arg("basic"));

  py::class_<Optimizer>(m, "Optimizer")
      .def(py::init([](const SearchSpace& space, const py::kwargs& kw) { return Optimizer(make_config(space, kw)); }),
           py::arg("space"))
      .def("suggest", [](Optimizer& o) { return suggestion_to_dict(o.suggest()); })
      .def(
          "observe",
          [](Optimizer& o, const std::string& id, double output, double cost, bool is_failure) {
            o.observe(id, output, cost, is_failure);
          },
          py::arg("suggestion_id"), py::arg("output"), py::arg("cost"), py::arg("is_failure") = false)
      .def("forget_outstanding", &Optimizer::forget_outstanding)
      .def("snapshot", &Optimizer::snapshot)
      .def_static("restore", [](const std::string& bytes) { return Optimizer::restore(bytes); })
      .def("pareto_front", [](const Optimizer& o) { return front_to_list(o.pareto_front()); })
      .def_property_readonly("suggestion_counter", [](const Optimizer& o) { return o.state().suggestion_counter; })
      .def_property_readonly("observation_count", [](const Optimizer& o) { return o.state().observations.size(); })
      .def("fit_scaling", [](const Optimizer& o) {
        const ScalingFit fit = fit_scaling(o.config().space, o.pareto_front());
        py::dict d;
        for (const auto& p : fit.params) d[py::str(p.name)] = py::make_tuple(p.slope, p.intercept, p.stderr_slope);
        return d;
      });

  m.def(
      "pareto_indices",
      [](const std::vector<double>& outputs, const std::vector<double>& costs) {
        return pareto_indices(to_points(outputs, costs));
      },
      py::arg("outputs"), py::arg("costs"), "Indices of the non-dominated points, cheapest first.");

  m.def(
      "expected_improvement",
      [](double mean, double variance, double baseline) { return expected_improvement({mean, variance}, baseline); },
      py::arg("mean"), py::arg("variance"), py::arg("baseline"));
  m.def(
      "success_probability", [](double mean, double variance) { return success_probability({mean, variance}); },
      py::arg("mean"), py::arg("variance"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));

  py::class_<QuantileWarp>(m, "QuantileWarp")
      .def(py::init([](const std::vector<double>& values) { return QuantileWarp::fit(values); }), py::arg("values"))
      .def("warp", py::overload_cast<double>(&QuantileWarp::warp, py::const_), py::arg("value"))
      .def("unwarp", &QuantileWarp::unwarp, py::arg("score"));

  m.def(
      "run_benchmark",
      [](const std::string& problem, const std::string& tuner, std::uint64_t seed, std::size_t evaluations,
         bool resampling_enabled) {
        harness::BenchRunOptions opts;
        opts.evaluations = evaluations;
        opts.resampling_enabled = resampling_enabled;
        const auto run = harness::run_benchmark(harness::make_problem(problem), harness::parse_tuner(tuner), seed, opts);
        py::dict d;
        d["best_so_far"] = run.best_so_far;
        d["final_true_best"] = run.final_true_best;
        d["total_cost"] = run.total_cost;
        d["front"] = front_to_list(run.front);
        return d;
      },
      py::arg("problem"), py::arg("tuner") = "carbs", py::arg("seed") = 0, py::arg("evaluations") = 100,
      py::arg("resampling_enabled") = true);

  m.attr("__version__") = "0.1.0";
}
