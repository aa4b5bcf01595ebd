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

#include "carbs/param_space.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace carbs {

struct Observation {
  std::string suggestion_id;
  ParamMap params;
  Vector basic;
  double output = 0.0;
  double cost = 1.0;
  bool is_failure = false;
  /// Issue order of the originating suggestion.
  std::int64_t sequence = 0;
  double timestamp = 0.0;
};

/// Successful observations sharing identical natural parameters.
struct ObservationGroup {
  ParamMap key;
  Vector basic;
  /// Indices into the observation list the group was built from.
  std::vector<std::size_t> members;
  double mean_output = 0.0;
  double max_output = 0.0;
  double mean_cost = 0.0;

  std::size_t count() const { return members.size(); }
  /// Max output for single observations, mean output for resampled groups.
  double effective_output() const { return members.size() == 1 ? max_output : mean_output; }
};

/// Front members ordered by increasing mean cost.
struct ParetoSet {
  std::vector<ObservationGroup> members;

  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
};

struct OutputCost {
  double output;
  double cost;
};

/// Indices i with, for every j != i, output_i > output_j or cost_i < cost_j.
/// Exact duplicates exclude each other. Result is sorted by increasing cost.
std::vector<std::size_t> pareto_indices(std::span<const OutputCost> points);

/// The front over the successful observations; indices refer to the input.
/// Throws std::invalid_argument when there is no successful observation.
std::vector<std::size_t> raw_pareto(std::span<const Observation> observations);

/// Groups successful observations by exact parameter map, in order of first
/// appearance. Failures are skipped.
std::vector<ObservationGroup> group_observations(std::span<const Observation> observations);

/// Groups compared on (effective output, mean cost) on both sides.
ParetoSet grouped_pareto(std::span<const ObservationGroup> groups);

/// Starts the front at the best group among the cheapest 20% of all groups
/// and drops members below it.
ParetoSet apply_min_cost_floor(std::span<const ObservationGroup> groups, const ParetoSet& pareto);

/// Index into groups of the floor group used by apply_min_cost_floor.
std::size_t min_cost_floor_index(std::span<const ObservationGroup> groups);

}  // namespace carbs
