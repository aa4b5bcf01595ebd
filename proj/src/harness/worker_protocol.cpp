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

#include "carbs/harness/worker_protocol.hpp"

#include "carbs/harness/config.hpp"

#include <cmath>

namespace carbs::harness {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_suggestion_document(const SearchSpace& space, const SuggestionDocument& doc) {
  ordered_json j;
  j["suggestion_id"] = doc.suggestion_id;
  j["params"] = params_to_json(space, doc.params);
  j["is_resample"] = doc.is_resample;
  return j.dump() + "\n";
}

SuggestionDocument parse_suggestion_document(std::string_view text) {
  try {
    const json j = json::parse(text);
    SuggestionDocument doc;
    doc.suggestion_id = j.at("suggestion_id").get<std::string>();
    doc.params = params_from_json(j.at("params"));
    doc.is_resample = j.value("is_resample", false);
    return doc;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed suggestion document: ") + e.what());
  }
}

std::string format_observation_document(const ObservationDocument& doc) {
  ordered_json j;
  j["suggestion_id"] = doc.suggestion_id;
  j["output"] = std::isfinite(doc.output) ? json(doc.output) : json(nullptr);
  if (doc.cost) j["cost"] = *doc.cost;
  j["is_failure"] = doc.is_failure;
  return j.dump() + "\n";
}

ObservationDocument parse_observation_document(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed observation document: ") + e.what());
  }
  try {
    if (!j.is_object()) throw ProtocolError("observation document must be a JSON object");
    ObservationDocument doc;
    const auto& id = j.at("suggestion_id");
    doc.suggestion_id = id.is_string() ? id.get<std::string>() : id.dump();
    doc.is_failure = j.value("is_failure", false);
    const auto out = j.find("output");
    if (out == j.end() || out->is_null()) {
      if (!doc.is_failure) throw ProtocolError("successful observation lacks an output");
      doc.output = std::nan("");
    } else {
      doc.output = out->get<double>();
      if (!doc.is_failure && !std::isfinite(doc.output)) throw ProtocolError("output must be finite");
    }
    const auto cost = j.find("cost");
    if (cost != j.end() && !cost->is_null()) {
      doc.cost = cost->get<double>();
      if (!(*doc.cost > 0.0) || !std::isfinite(*doc.cost)) throw ProtocolError("cost must be positive");
    }
    return doc;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed observation document: ") + e.what());
  }
}

std::string expand_command(std::string_view command_template, std::string_view suggestion_path,
                           std::string_view result_path) {
  std::string out(command_template);
  const auto replace = [&out](std::string_view needle, std::string_view value) {
    for (auto pos = out.find(needle); pos != std::string::npos; pos = out.find(needle, pos + value.size())) {
      out.replace(pos, needle.size(), value);
    }
  };
  replace(kSuggestionPlaceholder, suggestion_path);
  replace(kResultPlaceholder, result_path);
  return out;
}

}  // namespace carbs::harness
