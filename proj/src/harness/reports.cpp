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

#include "carbs/harness/reports.hpp"

#include "carbs/harness/config.hpp"
#include "carbs/harness/tuning_run.hpp"
#include "carbs/scaling.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace carbs::harness {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{:.17g}", v);
}

std::string param_header(const SearchSpace& space) {
  std::string out;
  for (const auto& name : space.names()) out += "," + name;
  return out;
}

std::string param_cells(const SearchSpace& space, const ParamMap& params) {
  std::string out;
  for (const auto& name : space.names()) {
    const auto it = params.find(name);
    out += "," + (it == params.end() ? std::string() : num(it->second));
  }
  return out;
}

}  // namespace

std::vector<Observation> read_observation_log(const SearchSpace& space, const fs::path& path) {
  std::vector<Observation> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  std::size_t pos = 0;
  while (true) {
    const auto nl = data.find('\n', pos);
    if (nl == std::string::npos) break;
    const std::string line = data.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    out.push_back(observation_from_json(space, json::parse(line)));
  }
  return out;
}

ParetoSet report_front(const std::vector<Observation>& observations) {
  const auto groups = group_observations(observations);
  if (groups.empty()) return {};
  return grouped_pareto(groups);
}

ReportFiles write_reports(const SearchSpace& space, const std::vector<Observation>& observations,
                          const fs::path& dir) {
  ReportFiles files{dir / "pareto.csv", dir / "scaling.csv", dir / "plotdata.csv",
                    dir / "observations.jsonl"};
  const ParetoSet front = report_front(observations);

  std::ostringstream pareto;
  pareto << "cost,output,n" << param_header(space) << "\n";
  std::set<std::size_t> on_front;
  for (const auto& m : front.members) {
    pareto << num(m.mean_cost) << "," << num(m.effective_output()) << "," << m.count()
           << param_cells(space, m.key) << "\n";
    on_front.insert(m.members.begin(), m.members.end());
  }
  write_file_atomic(files.pareto_csv, pareto.str());

  std::ostringstream scaling;
  scaling << "param,space_type,slope,intercept,stderr,power_law_exponent\n";
  if (front.size() >= 3) {
    try {
      const ScalingFit fit = fit_scaling(space, front);
      for (std::size_t i = 0; i < fit.params.size(); ++i) {
        const auto& p = fit.params[i];
        const auto& spec = space.spec(i);
        scaling << p.name << "," << to_string(spec.space_type) << "," << num(p.slope) << ","
                << num(p.intercept) << "," << num(p.stderr_slope) << ","
                << num(power_law_exponent(spec, p)) << "\n";
      }
    } catch (const ScalingError&) {
      // Degenerate cost spread: headers only.
    }
  }
  write_file_atomic(files.scaling_csv, scaling.str());

  std::ostringstream plot;
  plot << "suggestion_id,sequence,cost,output,is_failure,on_front" << param_header(space) << "\n";
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& o = observations[i];
    plot << o.suggestion_id << "," << o.sequence << "," << num(o.cost) << ","
         << (o.is_failure ? std::string() : num(o.output)) << "," << (o.is_failure ? 1 : 0) << ","
         << (on_front.count(i) ? 1 : 0) << param_cells(space, o.params) << "\n";
  }
  write_file_atomic(files.plotdata_csv, plot.str());

  if (!fs::exists(files.observations_jsonl)) {
    std::ofstream log(files.observations_jsonl);
    for (const auto& o : observations) log << observation_to_json(space, o).dump() << "\n";
  }
  return files;
}

ReportFiles emit_reports(const fs::path& run_dir) {
  const RunPaths paths{run_dir};
  std::ifstream in(paths.config());
  if (!in) throw RunError("no config.json in " + run_dir.string());
  const TuneConfig config = tune_config_from_json(json::parse(in));
  const auto observations = read_observation_log(config.optimizer.space, paths.observations());
  return write_reports(config.optimizer.space, observations, run_dir);
}

}  // namespace carbs::harness
