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

#include <Eigen/Core>

#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace carbs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Natural-unit parameter values keyed by parameter name.
using ParamMap = std::map<std::string, double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class SpaceType { Log, Logit, Linear };

std::string_view to_string(SpaceType type);
/// Accepts "log", "logit", "linear" in any letter case.
SpaceType parse_space_type(std::string_view text);

class SpaceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ParamSpec {
  std::string name;
  SpaceType space_type = SpaceType::Linear;
  double search_center = 0.0;
  double min_bound = -kInfinity;
  double max_bound = kInfinity;
  bool is_integer = false;
  /// Basic-space units per transformed unit.
  double scale = 1.0;

  /// Throws SpaceError when the bounds, center or scale are inconsistent
  /// with the space type.
  void validate() const;
};

/// An ordered set of named dimensions together with the bijection between
/// natural values and the centered, order-one "basic" space in which all
/// modelling and local search happen.
///
/// For each dimension the basic coordinate is (T(v) - T(center)) / scale with
/// T = ln for Log, the logit for Logit and the identity for Linear, so the
/// search center sits at the origin.
class SearchSpace {
 public:
  SearchSpace() = default;
  explicit SearchSpace(std::vector<ParamSpec> specs);

  std::size_t dimension() const { return specs_.size(); }
  const std::vector<ParamSpec>& specs() const { return specs_; }
  const ParamSpec& spec(std::size_t i) const { return specs_.at(i); }
  std::vector<std::string> names() const;

  /// Throws SpaceError on a missing name, an out-of-bounds or non-finite
  /// value. Logit values of exactly 0 or 1 are nudged inward by 1e-9.
  Vector to_basic(const ParamMap& natural) const;

  /// Inverse of to_basic followed by clamping into the bounds and, for
  /// integer dimensions, rounding (ties toward the search center).
  ParamMap from_basic(const Vector& basic) const;

  ParamMap centers() const { return from_basic(Vector::Zero(dimension())); }

  /// Basic-space coordinates of the bounds; infinite where unbounded.
  Vector basic_lower() const;
  Vector basic_upper() const;

 private:
  std::vector<ParamSpec> specs_;
};

}  // namespace carbs
