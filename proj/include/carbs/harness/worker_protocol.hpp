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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace carbs::harness {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Written by the harness for each evaluation.
struct SuggestionDocument {
  std::string suggestion_id;
  ParamMap params;
  bool is_resample = false;
};

/// Written by the worker into its result file.
struct ObservationDocument {
  std::string suggestion_id;
  double output = 0.0;
  /// Seconds; the harness substitutes wall-clock time when absent.
  std::optional<double> cost;
  bool is_failure = false;
};

/// Single-line JSON document terminated by a newline.
std::string format_suggestion_document(const SearchSpace& space, const SuggestionDocument& doc);
SuggestionDocument parse_suggestion_document(std::string_view text);

std::string format_observation_document(const ObservationDocument& doc);
/// Throws ProtocolError on malformed JSON, missing fields, a non-finite
/// output on a success or a non-positive cost.
ObservationDocument parse_observation_document(std::string_view text);

/// Substitutes the suggestion and result paths into the command template.
std::string expand_command(std::string_view command_template, std::string_view suggestion_path,
                           std::string_view result_path);

}  // namespace carbs::harness
