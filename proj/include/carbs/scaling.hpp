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
#include "carbs/pareto.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace carbs {

/// Least-squares line of one basic coordinate against ln(cost).
struct ParamScaling {
  std::string name;
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

struct ScalingFit {
  std::vector<ParamScaling> params;
  double min_cost = 0.0;
  double max_cost = 0.0;
  std::size_t front_size = 0;
};

struct ScalingOptions {
  /// Weight each front member by its sample count.
  bool weight_by_count = false;
};

class ScalingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Regresses every basic coordinate of the front members on ln(mean cost).
/// Throws ScalingError for fewer than 3 members or zero cost spread.
ScalingFit fit_scaling(const SearchSpace& space, const ParetoSet& pareto,
                       const ScalingOptions& options = {});

struct Extrapolation {
  ParamMap params;
  Vector basic;
  /// Target lies more than 10x outside the fitted cost range.
  bool beyond_range = false;
};

Extrapolation extrapolate(const SearchSpace& space, const ScalingFit& fit, double target_cost);

/// Exponent of natural value vs cost implied by a Log-space slope, or NaN
/// for other space types.
double power_law_exponent(const ParamSpec& spec, const ParamScaling& scaling);

}  // namespace carbs
