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

#pragma once

#include "carbs/acquisition.hpp"
#include "carbs/gaussian_process.hpp"
#include "carbs/param_space.hpp"
#include "carbs/pareto.hpp"
#include "carbs/warp.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace carbs {

struct OptimizerConfig {
  SearchSpace space;
  double sigma_search = 0.3;
  /// Candidates drawn per front member.
  std::size_t n_cand = 100;
  std::size_t max_candidates = 5000;
  std::size_t n_resample = 4;
  double c_max = kInfinity;
  AcquisitionMode acquisition_mode = AcquisitionMode::EiThreshold;
  bool resampling_enabled = true;
  std::size_t n_init = 5;
  std::uint64_t seed = 0;
  bool model_log_cost = true;
  FitOptions fit;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

enum class SuggestionKind { Bootstrap, Resample, Search, FitFallback };

std::string_view to_string(SuggestionKind kind);

struct SuggestionMetadata {
  SuggestionKind kind = SuggestionKind::Bootstrap;
  bool cost_ceiling_fallback = false;
  /// Present for Search suggestions.
  std::optional<ScoredCandidate> scored;
  double threshold_cost = 0.0;
  std::size_t candidates = 0;
  std::string warning;
};

struct Suggestion {
  std::string suggestion_id;
  ParamMap params;
  bool is_resample = false;
  SuggestionMetadata metadata;
};

struct OutstandingSuggestion {
  std::string suggestion_id;
  ParamMap params;
  Vector basic;
  bool is_resample = false;
  std::int64_t sequence = 0;
};

struct RunState {
  /// Append-only, in arrival order.
  std::vector<Observation> observations;
  /// Issued but not yet observed, in issue order.
  std::vector<OutstandingSuggestion> outstanding;
  std::uint64_t suggestion_counter = 0;
  /// Suggestions issued after bootstrap; drives the resampling schedule.
  std::uint64_t search_counter = 0;
};

class ObserveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The training sets the surrogates are fitted on, ordered by issue
/// sequence so that they do not depend on observation arrival order.
struct TrainingData {
  std::vector<const Observation*> successes;
  std::vector<const Observation*> all;
  bool has_failures = false;
};

/// Ask/tell driver. suggest and observe must be externally serialised.
class Optimizer {
 public:
  static constexpr int kSnapshotVersion = 1;

  explicit Optimizer(OptimizerConfig config);

  Suggestion suggest();

  /// Throws ObserveError for unknown or already observed ids, non-positive
  /// cost, or a non-finite output on a success.
  const Observation& observe(const std::string& suggestion_id, double output, double cost,
                             bool is_failure, double timestamp = 0.0);

  /// Drops all outstanding suggestions; their ids are never reissued.
  void forget_outstanding();

  std::string snapshot() const;
  /// Throws SnapshotError on a corrupt payload or a version mismatch.
  static Optimizer restore(std::string_view bytes);

  const RunState& state() const { return state_; }
  const OptimizerConfig& config() const { return config_; }

  TrainingData training_data() const;
  /// Grouped front with the minimum-cost floor over current observations.
  ParetoSet pareto_front() const;
  std::size_t success_count() const;

 private:
  Suggestion issue(ParamMap params, bool is_resample, SuggestionMetadata metadata);
  ParamMap bootstrap_params(Rng& rng) const;
  std::optional<ParamMap> resample_params() const;
  ParamMap search_params(Rng& rng, SuggestionMetadata& metadata) const;

  OptimizerConfig config_;
  RunState state_;
};

// JSON forms shared by snapshots, run directories and the Python module.
nlohmann::ordered_json space_to_json(const SearchSpace& space);
SearchSpace space_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const OptimizerConfig& config);
OptimizerConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json params_to_json(const SearchSpace& space, const ParamMap& params);
ParamMap params_from_json(const nlohmann::json& j);
/// One observation-log record: suggestion_id, params, output, cost,
/// is_failure, timestamp, sequence.
nlohmann::ordered_json observation_to_json(const SearchSpace& space, const Observation& obs);
Observation observation_from_json(const SearchSpace& space, const nlohmann::json& j);

}  // namespace carbs
