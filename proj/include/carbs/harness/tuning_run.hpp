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

#include "carbs/harness/config.hpp"

#include <filesystem>
#include <string>

namespace carbs::harness {

/// File names inside a run directory.
struct RunPaths {
  std::filesystem::path root;

  std::filesystem::path config() const { return root / "config.json"; }
  std::filesystem::path snapshot() const { return root / "snapshot.json"; }
  std::filesystem::path observations() const { return root / "observations.jsonl"; }
  std::filesystem::path diagnostics() const { return root / "diagnostics.log"; }
  std::filesystem::path work() const { return root / "work"; }
};

struct RunSummary {
  std::filesystem::path run_dir;
  std::size_t observations = 0;
  std::size_t failures = 0;
  /// Worker results that were rejected or missing.
  std::size_t diagnostics = 0;
  std::size_t cancelled = 0;
  bool budget_expired = false;
};

class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Starts a fresh run in config.harness.output_dir. Refuses a directory
/// that already holds a snapshot.
RunSummary run_tuning(const TuneConfig& config);

/// Continues a run from its snapshot, replaying log records written after
/// the last snapshot. Outstanding evaluations of the interrupted run are
/// dropped.
RunSummary resume_tuning(const std::filesystem::path& run_dir);

/// Appends one line and fsyncs.
void append_line_durable(const std::filesystem::path& path, const std::string& line);
/// Write to a temporary sibling, fsync, rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
/// Cuts a trailing partial line left by an interrupted append.
void truncate_partial_line(const std::filesystem::path& path);

}  // namespace carbs::harness
