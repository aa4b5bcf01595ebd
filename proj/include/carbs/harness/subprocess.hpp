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

#include <sys/types.h>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace carbs::harness {

struct ExitStatus {
  bool exited = false;
  int code = 0;
  /// Terminating signal when !exited.
  int signal = 0;

  bool success() const { return exited && code == 0; }
};

struct SpawnOptions {
  /// Extra environment entries layered over the current environment.
  std::vector<std::pair<std::string, std::string>> env;
  /// Redirect targets; inherited when empty.
  std::filesystem::path stdout_path;
  std::filesystem::path stderr_path;
};

/// A `/bin/sh -c` child running in its own process group. The destructor
/// kills the group if the child is still running.
class Subprocess {
 public:
  Subprocess() = default;
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;
  Subprocess(Subprocess&& other) noexcept;
  Subprocess& operator=(Subprocess&& other) noexcept;
  ~Subprocess();

  /// Throws std::system_error when the shell cannot be spawned.
  static Subprocess spawn(const std::string& command, const SpawnOptions& options = {});

  /// Non-blocking; returns the status once the child has exited.
  std::optional<ExitStatus> poll();
  ExitStatus wait();
  /// SIGKILLs the whole process group and reaps the child.
  void kill();

  pid_t pid() const { return pid_; }
  bool running() const { return pid_ > 0 && !status_; }

 private:
  pid_t pid_ = -1;
  std::optional<ExitStatus> status_;
};

}  // namespace carbs::harness
