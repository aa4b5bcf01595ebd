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

#include "carbs/optimizer.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace carbs::harness {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::string_view kSuggestionPlaceholder = "{suggestion}";
inline constexpr std::string_view kResultPlaceholder = "{result}";

struct HarnessConfig {
  std::size_t parallelism = 1;
  /// Shell command; {suggestion} must appear exactly once, {result} at most once.
  std::string worker_command;
  /// Wall-clock budget in seconds.
  double budget_seconds = kInfinity;
  /// Stop issuing after this many suggestions in total (0 = unlimited).
  std::size_t max_evaluations = 0;
  std::filesystem::path output_dir;

  void validate() const;
};

struct TuneConfig {
  OptimizerConfig optimizer;
  HarnessConfig harness;
};

/// Parses the sectioned text format:
///
///   [search_space]
///   name   space_type  search_center  min  max  is_integer
///   lr     log         0.0005         0    inf  false
///
///   [optimizer]
///   sigma_search = 0.3
///
///   [harness]
///   parallelism = 2
///   worker_command = "python train.py {suggestion} {result}"
///
/// Relative output_dir paths are resolved against base_dir.
TuneConfig parse_tune_config(std::string_view text, const std::filesystem::path& base_dir = {});
TuneConfig load_tune_config(const std::filesystem::path& path);

nlohmann::ordered_json tune_config_to_json(const TuneConfig& config);
TuneConfig tune_config_from_json(const nlohmann::json& j);

}  // namespace carbs::harness
