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

#include "carbs/optimizer.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace carbs {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json bound_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double bound_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    throw std::invalid_argument("bad bound '" + s + "'");
  }
  if (j.is_null()) throw std::invalid_argument("missing bound");
  return j.get<double>();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Matrix stack_basic(const std::vector<const Observation*>& obs, std::size_t dim) {
  Matrix x(static_cast<Eigen::Index>(obs.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < obs.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = obs[i]->basic;
  return x;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (space.dimension() == 0) throw std::invalid_argument("optimizer needs a search space");
  if (!(sigma_search > 0.0) || !std::isfinite(sigma_search)) {
    throw std::invalid_argument("sigma_search must be positive");
  }
  if (n_cand < 1) throw std::invalid_argument("n_cand must be >= 1");
  if (max_candidates < 1) throw std::invalid_argument("max_candidates must be >= 1");
  if (n_resample < 2) throw std::invalid_argument("n_resample must be >= 2");
  if (!(c_max > 0.0)) throw std::invalid_argument("c_max must be positive");
  if (n_init < 1) throw std::invalid_argument("n_init must be >= 1");
  if (fit.restarts < 0 || fit.max_iterations < 1) throw std::invalid_argument("bad fit options");
}

std::string_view to_string(SuggestionKind kind) {
  switch (kind) {
    case SuggestionKind::Bootstrap:
      return "bootstrap";
    case SuggestionKind::Resample:
      return "resample";
    case SuggestionKind::Search:
      return "search";
    case SuggestionKind::FitFallback:
      return "fit_fallback";
  }
  return "search";
}

Optimizer::Optimizer(OptimizerConfig config) : config_(std::move(config)) { config_.validate(); }

std::size_t Optimizer::success_count() const {
  return static_cast<std::size_t>(std::count_if(state_.observations.begin(), state_.observations.end(),
                                                [](const Observation& o) { return !o.is_failure; }));
}

TrainingData Optimizer::training_data() const {
  TrainingData data;
  for (const auto& o : state_.observations) {
    data.all.push_back(&o);
    if (o.is_failure) {
      data.has_failures = true;
    } else {
      data.successes.push_back(&o);
    }
  }
  const auto by_sequence = [](const Observation* a, const Observation* b) {
    return a->sequence < b->sequence;
  };
  std::sort(data.all.begin(), data.all.end(), by_sequence);
  std::sort(data.successes.begin(), data.successes.end(), by_sequence);
  return data;
}

ParetoSet Optimizer::pareto_front() const {
  std::vector<Observation> ordered;
  for (const auto* o : training_data().all) ordered.push_back(*o);
  const auto groups = group_observations(ordered);
  if (groups.empty()) return {};
  return apply_min_cost_floor(groups, grouped_pareto(groups));
}

ParamMap Optimizer::bootstrap_params(Rng& rng) const {
  Vector basic(static_cast<Eigen::Index>(config_.space.dimension()));
  for (Eigen::Index i = 0; i < basic.size(); ++i) basic(i) = config_.sigma_search * standard_normal(rng);
  return config_.space.from_basic(basic);
}

std::optional<ParamMap> Optimizer::resample_params() const {
  const ParetoSet front = pareto_front();
  if (front.empty()) return std::nullopt;
  const ObservationGroup* pick = &front.members.front();
  for (const auto& m : front.members) {
    if (m.count() < pick->count() || (m.count() == pick->count() && m.mean_cost < pick->mean_cost)) {
      pick = &m;
    }
  }
  return pick->key;
}

ParamMap Optimizer::search_params(Rng& rng, SuggestionMetadata& metadata) const {
  const TrainingData data = training_data();
  const std::size_t dim = config_.space.dimension();

  std::vector<double> outputs, costs;
  for (const auto* o : data.successes) {
    outputs.push_back(o->output);
    costs.push_back(o->cost);
  }
  const QuantileWarp warp = QuantileWarp::fit(outputs);
  const Matrix x = stack_basic(data.successes, dim);
  Vector y(static_cast<Eigen::Index>(outputs.size()));
  for (std::size_t i = 0; i < outputs.size(); ++i) y(static_cast<Eigen::Index>(i)) = warp.warp(outputs[i]);
  const CostTransform cost_transform = CostTransform::fit(costs, config_.model_log_cost);
  Vector zc(static_cast<Eigen::Index>(costs.size()));
  for (std::size_t i = 0; i < costs.size(); ++i) {
    zc(static_cast<Eigen::Index>(i)) = cost_transform.to_model(costs[i]);
  }

  const KernelSpec surface{KernelKind::LinearPlusMatern, true};
  GaussianProcess output_gp = GaussianProcess::fit(x, y, surface, rng, config_.fit);
  GaussianProcess cost_gp = GaussianProcess::fit(x, zc, surface, rng, config_.fit);

  std::optional<GaussianProcess> failure_gp;
  if (data.has_failures) {
    const Matrix xa = stack_basic(data.all, dim);
    Vector f(static_cast<Eigen::Index>(data.all.size()));
    for (std::size_t i = 0; i < data.all.size(); ++i) {
      f(static_cast<Eigen::Index>(i)) = data.all[i]->is_failure ? 1.0 : -1.0;
    }
    failure_gp = GaussianProcess::fit(xa, f, surface, rng, config_.fit);
  }

  // Hallucinate the outstanding evaluations with one joint posterior draw.
  if (!state_.outstanding.empty()) {
    Matrix xo(static_cast<Eigen::Index>(state_.outstanding.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < state_.outstanding.size(); ++i) {
      xo.row(static_cast<Eigen::Index>(i)) = state_.outstanding[i].basic;
    }
    const Vector hallucinated = output_gp.thompson_sample(xo, rng);
    output_gp = output_gp.condition_on(xo, hallucinated);
  }

  std::vector<Observation> ordered;
  ordered.reserve(data.all.size());
  for (const auto* o : data.all) ordered.push_back(*o);
  const auto groups = group_observations(ordered);
  const ParetoSet front = apply_min_cost_floor(groups, grouped_pareto(groups));

  SurrogateModels models{std::move(output_gp), std::move(cost_gp), std::nullopt, 0.0,
                         std::move(failure_gp), cost_transform, y.maxCoeff()};
  if (front.size() >= 2) {
    Matrix xp(static_cast<Eigen::Index>(front.size()), 1);
    Vector yp(static_cast<Eigen::Index>(front.size()));
    for (std::size_t i = 0; i < front.size(); ++i) {
      xp(static_cast<Eigen::Index>(i), 0) = cost_transform.to_model(front.members[i].mean_cost);
      yp(static_cast<Eigen::Index>(i)) = warp.warp(front.members[i].effective_output());
    }
    models.pareto = GaussianProcess::fit(xp, yp, KernelSpec{KernelKind::Rbf, true}, rng, config_.fit);
  } else {
    models.pareto_constant = warp.warp(front.members.front().effective_output());
  }

  std::vector<Vector> centers;
  for (const auto& m : front.members) centers.push_back(m.basic);
  const auto candidates = generate_candidates(centers, config_.sigma_search, config_.n_cand,
                                              config_.max_candidates, rng);
  const Selection sel = score_and_select(
      candidates, models, front, AcquisitionConfig{config_.acquisition_mode, config_.c_max}, rng);

  metadata.kind = SuggestionKind::Search;
  metadata.cost_ceiling_fallback = sel.cost_ceiling_fallback;
  metadata.scored = sel.best;
  metadata.threshold_cost = sel.threshold.cost;
  metadata.candidates = candidates.size();
  if (sel.cost_ceiling_fallback) {
    metadata.warning = "every candidate exceeded the cost ceiling; returned the cheapest";
  }
  return config_.space.from_basic(sel.best.candidate.basic);
}

Suggestion Optimizer::suggest() {
  Rng rng = derive_rng(config_.seed, state_.suggestion_counter);
  SuggestionMetadata metadata;
  if (success_count() < config_.n_init) {
    metadata.kind = SuggestionKind::Bootstrap;
    return issue(bootstrap_params(rng), false, std::move(metadata));
  }

  const std::uint64_t k = ++state_.search_counter;
  if (config_.resampling_enabled && k % config_.n_resample == 0) {
    if (auto params = resample_params()) {
      metadata.kind = SuggestionKind::Resample;
      return issue(std::move(*params), true, std::move(metadata));
    }
  }

  try {
    ParamMap params = search_params(rng, metadata);
    return issue(std::move(params), false, std::move(metadata));
  } catch (const FitError& e) {
    spdlog::warn("surrogate fit failed ({}); falling back to bootstrap sampling", e.what());
    metadata = {};
    metadata.kind = SuggestionKind::FitFallback;
    metadata.warning = e.what();
    Rng fallback = derive_rng(config_.seed, state_.suggestion_counter, 1);
    return issue(bootstrap_params(fallback), false, std::move(metadata));
  }
}

Suggestion Optimizer::issue(ParamMap params, bool is_resample, SuggestionMetadata metadata) {
  const auto sequence = static_cast<std::int64_t>(state_.suggestion_counter++);
  Suggestion s;
  s.suggestion_id = std::to_string(sequence);
  s.params = std::move(params);
  s.is_resample = is_resample;
  s.metadata = std::move(metadata);
  state_.outstanding.push_back(
      {s.suggestion_id, s.params, config_.space.to_basic(s.params), is_resample, sequence});
  return s;
}

const Observation& Optimizer::observe(const std::string& suggestion_id, double output, double cost,
                                      bool is_failure, double timestamp) {
  const auto it = std::find_if(state_.outstanding.begin(), state_.outstanding.end(),
                               [&](const auto& o) { return o.suggestion_id == suggestion_id; });
  if (it == state_.outstanding.end()) {
    const bool seen = std::any_of(state_.observations.begin(), state_.observations.end(),
                                  [&](const auto& o) { return o.suggestion_id == suggestion_id; });
    throw ObserveError(seen ? "suggestion '" + suggestion_id + "' was already observed"
                            : "unknown suggestion id '" + suggestion_id + "'");
  }
  if (!(cost > 0.0) || !std::isfinite(cost)) throw ObserveError("cost must be positive and finite");
  if (!is_failure && !std::isfinite(output)) throw ObserveError("output must be finite for a success");

  Observation obs;
  obs.suggestion_id = suggestion_id;
  obs.params = it->params;
  obs.basic = it->basic;
  obs.output = std::isfinite(output) ? output : std::numeric_limits<double>::quiet_NaN();
  obs.cost = cost;
  obs.is_failure = is_failure;
  obs.sequence = it->sequence;
  obs.timestamp = timestamp;
  state_.outstanding.erase(it);
  state_.observations.push_back(std::move(obs));
  return state_.observations.back();
}

void Optimizer::forget_outstanding() { state_.outstanding.clear(); }

// --- serialisation -------------------------------------------------------

ordered_json space_to_json(const SearchSpace& space) {
  ordered_json rows = ordered_json::array();
  for (const auto& s : space.specs()) {
    ordered_json row;
    row["name"] = s.name;
    row["space_type"] = std::string(to_string(s.space_type));
    row["search_center"] = s.search_center;
    row["min"] = bound_to_json(s.min_bound);
    row["max"] = bound_to_json(s.max_bound);
    row["is_integer"] = s.is_integer;
    row["scale"] = s.scale;
    rows.push_back(std::move(row));
  }
  return rows;
}

SearchSpace space_from_json(const json& j) {
  std::vector<ParamSpec> specs;
  for (const auto& row : j) {
    ParamSpec s;
    s.name = row.at("name").get<std::string>();
    s.space_type = parse_space_type(row.at("space_type").get<std::string>());
    s.search_center = row.at("search_center").get<double>();
    s.min_bound = row.contains("min") ? bound_from_json(row.at("min")) : -kInfinity;
    s.max_bound = row.contains("max") ? bound_from_json(row.at("max")) : kInfinity;
    s.is_integer = row.value("is_integer", false);
    s.scale = row.value("scale", 1.0);
    specs.push_back(std::move(s));
  }
  return SearchSpace(std::move(specs));
}

ordered_json config_to_json(const OptimizerConfig& c) {
  ordered_json j;
  j["search_space"] = space_to_json(c.space);
  j["sigma_search"] = c.sigma_search;
  j["n_cand"] = c.n_cand;
  j["max_candidates"] = c.max_candidates;
  j["n_resample"] = c.n_resample;
  j["c_max"] = bound_to_json(c.c_max);
  j["acquisition_mode"] = std::string(to_string(c.acquisition_mode));
  j["resampling_enabled"] = c.resampling_enabled;
  j["n_init"] = c.n_init;
  j["seed"] = c.seed;
  j["model_log_cost"] = c.model_log_cost;
  j["fit_restarts"] = c.fit.restarts;
  j["fit_max_iterations"] = c.fit.max_iterations;
  j["fit_tolerance"] = c.fit.tolerance;
  j["noise_floor"] = c.fit.noise_floor;
  return j;
}

OptimizerConfig config_from_json(const json& j) {
  OptimizerConfig c;
  c.space = space_from_json(j.at("search_space"));
  c.sigma_search = j.value("sigma_search", c.sigma_search);
  c.n_cand = j.value("n_cand", c.n_cand);
  c.max_candidates = j.value("max_candidates", c.max_candidates);
  c.n_resample = j.value("n_resample", c.n_resample);
  if (j.contains("c_max")) c.c_max = bound_from_json(j.at("c_max"));
  if (j.contains("acquisition_mode")) {
    c.acquisition_mode = parse_acquisition_mode(j.at("acquisition_mode").get<std::string>());
  }
  c.resampling_enabled = j.value("resampling_enabled", c.resampling_enabled);
  c.n_init = j.value("n_init", c.n_init);
  c.seed = j.value("seed", c.seed);
  c.model_log_cost = j.value("model_log_cost", c.model_log_cost);
  c.fit.restarts = j.value("fit_restarts", c.fit.restarts);
  c.fit.max_iterations = j.value("fit_max_iterations", c.fit.max_iterations);
  c.fit.tolerance = j.value("fit_tolerance", c.fit.tolerance);
  c.fit.noise_floor = j.value("noise_floor", c.fit.noise_floor);
  return c;
}

ordered_json params_to_json(const SearchSpace& space, const ParamMap& params) {
  ordered_json j = ordered_json::object();
  for (const auto& s : space.specs()) {
    const auto it = params.find(s.name);
    if (it != params.end()) j[s.name] = it->second;
  }
  return j;
}

ParamMap params_from_json(const json& j) {
  ParamMap out;
  for (const auto& [k, v] : j.items()) out[k] = v.get<double>();
  return out;
}

ordered_json observation_to_json(const SearchSpace& space, const Observation& obs) {
  ordered_json j;
  j["suggestion_id"] = obs.suggestion_id;
  j["params"] = params_to_json(space, obs.params);
  j["output"] = number_or_null(obs.output);
  j["cost"] = obs.cost;
  j["is_failure"] = obs.is_failure;
  j["timestamp"] = obs.timestamp;
  j["sequence"] = obs.sequence;
  return j;
}

Observation observation_from_json(const SearchSpace& space, const json& j) {
  Observation obs;
  obs.suggestion_id = j.at("suggestion_id").get<std::string>();
  obs.params = params_from_json(j.at("params"));
  obs.basic = space.to_basic(obs.params);
  const auto& out = j.at("output");
  obs.output = out.is_null() ? std::numeric_limits<double>::quiet_NaN() : out.get<double>();
  obs.cost = j.at("cost").get<double>();
  obs.is_failure = j.at("is_failure").get<bool>();
  obs.timestamp = j.value("timestamp", 0.0);
  obs.sequence = j.value("sequence", std::int64_t{0});
  return obs;
}

std::string Optimizer::snapshot() const {
  ordered_json j;
  j["format"] = "carbs-snapshot";
  j["version"] = kSnapshotVersion;
  j["config"] = config_to_json(config_);
  j["suggestion_counter"] = state_.suggestion_counter;
  j["search_counter"] = state_.search_counter;
  ordered_json obs = ordered_json::array();
  for (const auto& o : state_.observations) obs.push_back(observation_to_json(config_.space, o));
  j["observations"] = std::move(obs);
  ordered_json outstanding = ordered_json::array();
  for (const auto& o : state_.outstanding) {
    ordered_json row;
    row["suggestion_id"] = o.suggestion_id;
    row["params"] = params_to_json(config_.space, o.params);
    row["is_resample"] = o.is_resample;
    row["sequence"] = o.sequence;
    outstanding.push_back(std::move(row));
  }
  j["outstanding"] = std::move(outstanding);
  return j.dump();
}

Optimizer Optimizer::restore(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw SnapshotError(std::string("corrupt snapshot: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string()) != "carbs-snapshot") {
      throw SnapshotError("not a carbs snapshot");
    }
    const int version = j.at("version").get<int>();
    if (version != kSnapshotVersion) {
      throw SnapshotError("snapshot version " + std::to_string(version) + " is not supported");
    }
    Optimizer opt(config_from_json(j.at("config")));
    opt.state_.suggestion_counter = j.at("suggestion_counter").get<std::uint64_t>();
    opt.state_.search_counter = j.at("search_counter").get<std::uint64_t>();
    for (const auto& row : j.at("observations")) {
      opt.state_.observations.push_back(observation_from_json(opt.config_.space, row));
    }
    for (const auto& row : j.at("outstanding")) {
      OutstandingSuggestion o;
      o.suggestion_id = row.at("suggestion_id").get<std::string>();
      o.params = params_from_json(row.at("params"));
      o.basic = opt.config_.space.to_basic(o.params);
      o.is_resample = row.at("is_resample").get<bool>();
      o.sequence = row.at("sequence").get<std::int64_t>();
      opt.state_.outstanding.push_back(std::move(o));
    }
    return opt;
  } catch (const SnapshotError&) {
    throw;
  } catch (const std::exception& e) {
    throw SnapshotError(std::string("corrupt snapshot: ") + e.what());
  }
}

}  // namespace carbs
