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

#include "carbs/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace carbs::harness {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Drops a trailing '#' comment that is not inside double quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

double parse_number(const std::string& raw, const std::string& what) {
  const std::string v = lower(unquote(raw));
  if (v == "inf" || v == "+inf" || v == "infinity" || v == "∞" || v == "$\\infty$") return kInfinity;
  if (v == "-inf" || v == "-infinity" || v == "-∞") return -kInfinity;
  double out = 0.0;
  const char* begin = v.data();
  const char* end = v.data() + v.size();
  if (!v.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected a number for " + what + ", got '" + raw + "'");
  return out;
}

std::size_t parse_count(const std::string& raw, const std::string& what) {
  const double v = parse_number(raw, what);
  if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ConfigError("expected a non-negative integer for " + what);
  }
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& raw, const std::string& what) {
  const std::string v = lower(unquote(raw));
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("expected a boolean for " + what + ", got '" + raw + "'");
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

void apply_optimizer_key(OptimizerConfig& c, const std::string& key, const std::string& value) {
  if (key == "sigma_search") c.sigma_search = parse_number(value, key);
  else if (key == "n_cand") c.n_cand = parse_count(value, key);
  else if (key == "max_candidates") c.max_candidates = parse_count(value, key);
  else if (key == "n_resample" || key == "N_resample") c.n_resample = parse_count(value, key);
  else if (key == "c_max") c.c_max = parse_number(value, key);
  else if (key == "acquisition_mode") c.acquisition_mode = parse_acquisition_mode(unquote(value));
  else if (key == "resampling_enabled") c.resampling_enabled = parse_bool(value, key);
  else if (key == "n_init") c.n_init = parse_count(value, key);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_count(value, key));
  else if (key == "model_log_cost") c.model_log_cost = parse_bool(value, key);
  else if (key == "fit_restarts") c.fit.restarts = static_cast<int>(parse_count(value, key));
  else if (key == "fit_max_iterations") c.fit.max_iterations = static_cast<int>(parse_count(value, key));
  else if (key == "fit_tolerance") c.fit.tolerance = parse_number(value, key);
  else if (key == "noise_floor") c.fit.noise_floor = parse_number(value, key);
  else throw ConfigError("unknown [optimizer] key '" + key + "'");
}

void apply_harness_key(HarnessConfig& h, const std::string& key, const std::string& value) {
  if (key == "parallelism") h.parallelism = parse_count(value, key);
  else if (key == "worker_command") h.worker_command = unquote(value);
  else if (key == "budget_seconds" || key == "budget") h.budget_seconds = parse_number(value, key);
  else if (key == "max_evaluations") h.max_evaluations = parse_count(value, key);
  else if (key == "output_dir") h.output_dir = unquote(value);
  else throw ConfigError("unknown [harness] key '" + key + "'");
}

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

void HarnessConfig::validate() const {
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (count_occurrences(worker_command, kSuggestionPlaceholder) != 1) {
    throw ConfigError("worker_command must contain {suggestion} exactly once");
  }
  if (count_occurrences(worker_command, kResultPlaceholder) > 1) {
    throw ConfigError("worker_command may contain {result} at most once");
  }
  if (!(budget_seconds > 0.0)) throw ConfigError("budget_seconds must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir is required");
}

TuneConfig parse_tune_config(std::string_view text, const std::filesystem::path& base_dir) {
  TuneConfig cfg;
  std::vector<ParamSpec> specs;
  std::vector<std::string> header;
  std::string section;

  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const auto where = " (line " + std::to_string(line_no) + ")";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header" + where);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "search_space" && section != "optimizer" && section != "harness") {
        throw ConfigError("unknown section [" + section + "]" + where);
      }
      continue;
    }
    if (section == "search_space") {
      auto cells = split_ws(line);
      if (header.empty()) {
        header = cells;
        for (const auto& h : header) {
          static const std::vector<std::string> known{"name", "space_type", "search_center", "min",
                                                      "max", "is_integer", "scale"};
          if (std::find(known.begin(), known.end(), h) == known.end()) {
            throw ConfigError("unknown search_space column '" + h + "'" + where);
          }
        }
        for (const char* required : {"name", "space_type", "search_center"}) {
          if (std::find(header.begin(), header.end(), required) == header.end()) {
            throw ConfigError(std::string("search_space header lacks '") + required + "'" + where);
          }
        }
        continue;
      }
      if (cells.size() != header.size()) throw ConfigError("row width does not match header" + where);
      ParamSpec spec;
      for (std::size_t i = 0; i < header.size(); ++i) {
        const auto& col = header[i];
        const auto& v = cells[i];
        if (col == "name") spec.name = v;
        else if (col == "space_type") spec.space_type = parse_space_type(v);
        else if (col == "search_center") spec.search_center = parse_number(v, col + where);
        else if (col == "min") spec.min_bound = parse_number(v, col + where);
        else if (col == "max") spec.max_bound = parse_number(v, col + where);
        else if (col == "is_integer") spec.is_integer = parse_bool(v, col + where);
        else if (col == "scale") spec.scale = parse_number(v, col + where);
      }
      specs.push_back(std::move(spec));
      continue;
    }
    const auto eq = line.find('=');
    if (section.empty() || eq == std::string::npos) throw ConfigError("expected key = value" + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section == "optimizer") {
      apply_optimizer_key(cfg.optimizer, key, value);
    } else {
      apply_harness_key(cfg.harness, key, value);
    }
  }

  try {
    cfg.optimizer.space = SearchSpace(std::move(specs));
    cfg.optimizer.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!cfg.harness.output_dir.empty() && cfg.harness.output_dir.is_relative() && !base_dir.empty()) {
    cfg.harness.output_dir = base_dir / cfg.harness.output_dir;
  }
  return cfg;
}

TuneConfig load_tune_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_tune_config(buf.str(), path.parent_path());
}

ordered_json tune_config_to_json(const TuneConfig& config) {
  ordered_json j;
  j["optimizer"] = config_to_json(config.optimizer);
  ordered_json h;
  h["parallelism"] = config.harness.parallelism;
  h["worker_command"] = config.harness.worker_command;
  h["budget_seconds"] = std::isfinite(config.harness.budget_seconds) ? json(config.harness.budget_seconds)
                                                                      : json("inf");
  h["max_evaluations"] = config.harness.max_evaluations;
  h["output_dir"] = config.harness.output_dir.string();
  j["harness"] = std::move(h);
  return j;
}

TuneConfig tune_config_from_json(const json& j) {
  TuneConfig cfg;
  cfg.optimizer = config_from_json(j.at("optimizer"));
  const auto& h = j.at("harness");
  cfg.harness.parallelism = h.at("parallelism").get<std::size_t>();
  cfg.harness.worker_command = h.at("worker_command").get<std::string>();
  const auto& budget = h.at("budget_seconds");
  cfg.harness.budget_seconds = budget.is_string() ? kInfinity : budget.get<double>();
  cfg.harness.max_evaluations = h.value("max_evaluations", std::size_t{0});
  cfg.harness.output_dir = h.at("output_dir").get<std::string>();
  return cfg;
}

}  // namespace carbs::harness
