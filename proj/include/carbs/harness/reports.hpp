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

#include <filesystem>
#include <vector>

namespace carbs::harness {

struct ReportFiles {
  std::filesystem::path pareto_csv;
  std::filesystem::path scaling_csv;
  std::filesystem::path plotdata_csv;
  std::filesystem::path observations_jsonl;
};

/// Reads an observation log (JSON lines). A trailing partial line is ignored.
std::vector<Observation> read_observation_log(const SearchSpace& space,
                                              const std::filesystem::path& path);

/// The grouped front of the logged successes, without the min-cost floor.
ParetoSet report_front(const std::vector<Observation>& observations);

/// Writes pareto.csv, scaling.csv and plotdata.csv next to observations.jsonl
/// using the search space recorded in config.json. An empty log gives
/// header-only files; scaling.csv stays header-only below 3 front members.
ReportFiles emit_reports(const std::filesystem::path& run_dir);

/// Same, for an in-memory observation list.
ReportFiles write_reports(const SearchSpace& space, const std::vector<Observation>& observations,
                          const std::filesystem::path& dir);

}  // namespace carbs::harness
