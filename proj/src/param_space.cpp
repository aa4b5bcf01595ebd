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

#include "carbs/param_space.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace carbs {
namespace {

constexpr double kLogitNudge = 1e-9;

double forward(SpaceType type, double v) {
  switch (type) {
    case SpaceType::Log:
      return std::log(v);
    case SpaceType::Logit:
      return std::log(v / (1.0 - v));
    case SpaceType::Linear:
      return v;
  }
  return v;
}

double inverse(SpaceType type, double t) {
  switch (type) {
    case SpaceType::Log:
      return std::exp(t);
    case SpaceType::Logit:
      return 1.0 / (1.0 + std::exp(-t));
    case SpaceType::Linear:
      return t;
  }
  return t;
}

// Nearest integer; exact halves go toward the search center.
double round_toward_center(double v, double center) {
  const double lo = std::floor(v);
  const double frac = v - lo;
  if (frac > 0.5) return lo + 1.0;
  if (frac < 0.5) return lo;
  return center > v ? lo + 1.0 : lo;
}

}  // namespace

std::string_view to_string(SpaceType type) {
  switch (type) {
    case SpaceType::Log:
      return "log";
    case SpaceType::Logit:
      return "logit";
    case SpaceType::Linear:
      return "linear";
  }
  return "linear";
}

SpaceType parse_space_type(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "log") return SpaceType::Log;
  if (lower == "logit") return SpaceType::Logit;
  if (lower == "linear") return SpaceType::Linear;
  throw SpaceError("unknown space type '" + std::string(text) + "'");
}

void ParamSpec::validate() const {
  if (name.empty()) throw SpaceError("parameter with empty name");
  const auto fail = [this](const std::string& why) {
    throw SpaceError("parameter '" + name + "': " + why);
  };
  if (!std::isfinite(search_center)) fail("search center must be finite");
  if (std::isnan(min_bound) || std::isnan(max_bound)) fail("bounds must not be NaN");
  if (!(min_bound < search_center && search_center < max_bound)) {
    fail("requires min < search_center < max");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) fail("scale must be positive and finite");
  switch (space_type) {
    case SpaceType::Log:
      if (min_bound < 0.0) fail("log space requires min >= 0");
      if (search_center <= 0.0) fail("log space requires search_center > 0");
      if (is_integer && max_bound < 1.0) fail("integer log parameter needs max >= 1");
      break;
    case SpaceType::Logit:
      if (min_bound < 0.0 || max_bound > 1.0) fail("logit space requires 0 <= min < max <= 1");
      if (is_integer) fail("logit parameters cannot be integer");
      break;
    case SpaceType::Linear:
      break;
  }
  if (is_integer && std::floor(max_bound) < std::ceil(min_bound)) {
    fail("no integer lies within the bounds");
  }
}

SearchSpace::SearchSpace(std::vector<ParamSpec> specs) : specs_(std::move(specs)) {
  if (specs_.empty()) throw SpaceError("search space needs at least one parameter");
  std::set<std::string> seen;
  for (const auto& spec : specs_) {
    spec.validate();
    if (!seen.insert(spec.name).second) {
      throw SpaceError("duplicate parameter name '" + spec.name + "'");
    }
  }
}

std::vector<std::string> SearchSpace::names() const {
  std::vector<std::string> out;
  out.reserve(specs_.size());
  for (const auto& s : specs_) out.push_back(s.name);
  return out;
}

Vector SearchSpace::to_basic(const ParamMap& natural) const {
  Vector basic(static_cast<Eigen::Index>(specs_.size()));
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& spec = specs_[i];
    const auto it = natural.find(spec.name);
    if (it == natural.end()) throw SpaceError("missing parameter '" + spec.name + "'");
    double v = it->second;
    if (!std::isfinite(v)) throw SpaceError("non-finite value for '" + spec.name + "'");
    if (v < spec.min_bound || v > spec.max_bound) {
      throw SpaceError("value " + std::to_string(v) + " for '" + spec.name +
                       "' is outside its bounds");
    }
    if (spec.space_type == SpaceType::Log && v <= 0.0) {
      throw SpaceError("log parameter '" + spec.name + "' must be positive");
    }
    if (spec.space_type == SpaceType::Logit && (v <= 0.0 || v >= 1.0)) {
      spdlog::warn("logit parameter '{}' at boundary value {}; nudging by {}", spec.name, v,
                   kLogitNudge);
      v = v <= 0.0 ? kLogitNudge : 1.0 - kLogitNudge;
    }
    basic(static_cast<Eigen::Index>(i)) =
        (forward(spec.space_type, v) - forward(spec.space_type, spec.search_center)) /
        spec.scale;
  }
  return basic;
}

ParamMap SearchSpace::from_basic(const Vector& basic) const {
  if (static_cast<std::size_t>(basic.size()) != specs_.size()) {
    throw SpaceError("basic vector has wrong dimension");
  }
  ParamMap out;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& spec = specs_[i];
    const double t = basic(static_cast<Eigen::Index>(i)) * spec.scale +
                     forward(spec.space_type, spec.search_center);
    double v = std::clamp(inverse(spec.space_type, t), spec.min_bound, spec.max_bound);
    if (std::isinf(v)) v = std::copysign(std::numeric_limits<double>::max(), v);
    if (spec.is_integer) {
      v = round_toward_center(v, spec.search_center);
      if (v < spec.min_bound) v = std::ceil(spec.min_bound);
      if (v > spec.max_bound) v = std::floor(spec.max_bound);
      if (spec.space_type == SpaceType::Log && v < 1.0) v = 1.0;
    }
    out.emplace(spec.name, v);
  }
  return out;
}

Vector SearchSpace::basic_lower() const {
  Vector out(static_cast<Eigen::Index>(specs_.size()));
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& s = specs_[i];
    const double c = forward(s.space_type, s.search_center);
    double lo = -kInfinity;
    if (s.space_type == SpaceType::Linear && std::isfinite(s.min_bound)) lo = s.min_bound;
    if (s.space_type != SpaceType::Linear && s.min_bound > 0.0) lo = forward(s.space_type, s.min_bound);
    out(static_cast<Eigen::Index>(i)) = std::isfinite(lo) ? (lo - c) / s.scale : -kInfinity;
  }
  return out;
}

Vector SearchSpace::basic_upper() const {
  Vector out(static_cast<Eigen::Index>(specs_.size()));
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& s = specs_[i];
    const double c = forward(s.space_type, s.search_center);
    double hi = kInfinity;
    if (s.space_type == SpaceType::Logit) {
      if (s.max_bound < 1.0) hi = forward(s.space_type, s.max_bound);
    } else if (std::isfinite(s.max_bound)) {
      hi = forward(s.space_type, s.max_bound);
    }
    out(static_cast<Eigen::Index>(i)) = std::isfinite(hi) ? (hi - c) / s.scale : kInfinity;
  }
  return out;
}

}  // namespace carbs
