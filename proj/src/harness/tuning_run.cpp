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

#include "carbs/harness/tuning_run.hpp"

#include "carbs/harness/reports.hpp"
#include "carbs/harness/subprocess.hpp"
#include "carbs/harness/worker_protocol.hpp"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>
#include <thread>

namespace carbs::harness {
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested.store(true); }

class StopSignalGuard {
 public:
  StopSignalGuard() {
    g_stop_requested.store(false);
    struct sigaction sa {};
    sa.sa_handler = on_stop_signal;
    sigemptyset(&sa.sa_mask);
    sigaction(SIGINT, &sa, &old_int_);
    sigaction(SIGTERM, &sa, &old_term_);
  }
  ~StopSignalGuard() {
    sigaction(SIGINT, &old_int_, nullptr);
    sigaction(SIGTERM, &old_term_, nullptr);
  }

 private:
  struct sigaction old_int_ {};
  struct sigaction old_term_ {};
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double unix_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

struct RunningWorker {
  Subprocess process;
  std::string suggestion_id;
  fs::path result_path;
  Clock::time_point started;
};

class Coordinator {
 public:
  Coordinator(TuneConfig config, Optimizer optimizer, RunPaths paths)
      : config_(std::move(config)), optimizer_(std::move(optimizer)), paths_(std::move(paths)) {
    for (const auto& o : optimizer_.state().observations) observed_ids_.insert(o.suggestion_id);
  }

  RunSummary run() {
    StopSignalGuard guard;
    const auto deadline_s = config_.harness.budget_seconds;
    const auto start = Clock::now();
    RunSummary summary;
    summary.run_dir = paths_.root;

    while (true) {
      reap();
      const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
      if (elapsed >= deadline_s || g_stop_requested.load()) {
        summary.budget_expired = elapsed >= deadline_s;
        break;
      }
      while (running_.size() < config_.harness.parallelism && may_issue()) launch();
      if (running_.empty()) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }

    summary.cancelled = running_.size();
    for (auto& w : running_) {
      w.process.kill();
      diagnose("cancelled evaluation " + w.suggestion_id);
    }
    running_.clear();
    if (summary.cancelled > 0) {
      optimizer_.forget_outstanding();
      persist();
    }

    for (const auto& o : optimizer_.state().observations) {
      ++summary.observations;
      if (o.is_failure) ++summary.failures;
    }
    summary.diagnostics += diagnostics_;
    emit_reports(paths_.root);
    return summary;
  }

 private:
  bool may_issue() const {
    const auto cap = config_.harness.max_evaluations;
    if (cap == 0) return true;
    const auto& st = optimizer_.state();
    return st.observations.size() + st.outstanding.size() < cap;
  }

  void launch() {
    const Suggestion s = optimizer_.suggest();
    persist();
    const fs::path suggestion_path = paths_.work() / (s.suggestion_id + ".suggestion.json");
    const fs::path result_path = paths_.work() / (s.suggestion_id + ".result.json");
    std::error_code ec;
    fs::remove(result_path, ec);
    write_file_atomic(suggestion_path, format_suggestion_document(
                                           config_.optimizer.space,
                                           {s.suggestion_id, s.params, s.is_resample}));

    const bool explicit_result =
        config_.harness.worker_command.find(kResultPlaceholder) != std::string::npos;
    SpawnOptions opts;
    opts.env = {{"CARBS_SUGGESTION_FILE", suggestion_path.string()},
                {"CARBS_RESULT_FILE", result_path.string()},
                {"CARBS_SUGGESTION_ID", s.suggestion_id}};
    if (!explicit_result) opts.stdout_path = result_path;
    opts.stderr_path = paths_.work() / (s.suggestion_id + ".stderr");
    const std::string command =
        expand_command(config_.harness.worker_command, suggestion_path.string(), result_path.string());

    RunningWorker w;
    w.suggestion_id = s.suggestion_id;
    w.result_path = result_path;
    w.started = Clock::now();
    try {
      w.process = Subprocess::spawn(command, opts);
    } catch (const std::system_error& e) {
      diagnose("could not start worker for " + s.suggestion_id + ": " + e.what());
      record(s.suggestion_id, std::nan(""), 1e-6, true);
      return;
    }
    running_.push_back(std::move(w));
  }

  void reap() {
    for (auto it = running_.begin(); it != running_.end();) {
      const auto status = it->process.poll();
      if (!status) {
        ++it;
        continue;
      }
      finish(*it, *status);
      it = running_.erase(it);
    }
  }

  void finish(const RunningWorker& w, const ExitStatus& status) {
    const double elapsed =
        std::max(std::chrono::duration<double>(Clock::now() - w.started).count(), 1e-6);
    const auto& id = w.suggestion_id;
    if (!status.success()) {
      diagnose("worker for " + id + (status.exited ? " exited with code " + std::to_string(status.code)
                                                   : " killed by signal " + std::to_string(status.signal)));
      record(id, std::nan(""), elapsed, true);
      return;
    }
    std::ifstream in(w.result_path);
    if (!in) {
      diagnose("worker for " + id + " left no result file");
      record(id, std::nan(""), elapsed, true);
      return;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    ObservationDocument doc;
    try {
      doc = parse_observation_document(buf.str());
    } catch (const ProtocolError& e) {
      diagnose("result for " + id + " rejected: " + e.what());
      record(id, std::nan(""), elapsed, true);
      return;
    }
    if (doc.suggestion_id != id) {
      const bool duplicate = observed_ids_.count(doc.suggestion_id) > 0;
      diagnose("result for " + id + " rejected: " + (duplicate ? "duplicate" : "mismatched") +
               " suggestion_id '" + doc.suggestion_id + "'");
      record(id, std::nan(""), elapsed, true);
      return;
    }
    record(id, doc.output, doc.cost.value_or(elapsed), doc.is_failure);
  }

  void record(const std::string& id, double output, double cost, bool is_failure) {
    const Observation& obs = optimizer_.observe(id, output, cost, is_failure, unix_seconds());
    observed_ids_.insert(id);
    append_line_durable(paths_.observations(),
                        observation_to_json(config_.optimizer.space, obs).dump() + "\n");
    persist();
  }

  void persist() { write_file_atomic(paths_.snapshot(), optimizer_.snapshot()); }

  void diagnose(const std::string& message) {
    ++diagnostics_;
    spdlog::warn("{}", message);
    std::ostringstream line;
    line.precision(17);
    line << unix_seconds() << " " << message << "\n";
    append_line_durable(paths_.diagnostics(), line.str());
  }

  TuneConfig config_;
  Optimizer optimizer_;
  RunPaths paths_;
  std::vector<RunningWorker> running_;
  std::set<std::string> observed_ids_;
  std::size_t diagnostics_ = 0;
};

}  // namespace

void append_line_durable(const fs::path& path, const std::string& line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), "open " + path.string());
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      throw std::system_error(err, std::generic_category(), "write " + path.string());
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), "open " + tmp.string());
  std::size_t written = 0;
  while (written < contents.size()) {
    const ssize_t n = ::write(fd, contents.data() + written, contents.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      throw std::system_error(err, std::generic_category(), "write " + tmp.string());
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  fs::rename(tmp, path);
}

void truncate_partial_line(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return;
  const std::string data = read_file(path);
  if (data.empty() || data.back() == '\n') return;
  const auto last = data.rfind('\n');
  fs::resize_file(path, last == std::string::npos ? 0 : last + 1);
}

RunSummary run_tuning(const TuneConfig& config) {
  config.harness.validate();
  config.optimizer.validate();
  RunPaths paths{config.harness.output_dir};
  if (fs::exists(paths.snapshot())) {
    throw RunError("run directory " + paths.root.string() + " already holds a run; use resume");
  }
  fs::create_directories(paths.work());
  write_file_atomic(paths.config(), tune_config_to_json(config).dump(2) + "\n");
  std::ofstream(paths.observations(), std::ios::app).close();
  Optimizer optimizer(config.optimizer);
  write_file_atomic(paths.snapshot(), optimizer.snapshot());
  return Coordinator(config, std::move(optimizer), paths).run();
}

RunSummary resume_tuning(const fs::path& run_dir) {
  RunPaths paths{run_dir};
  TuneConfig config;
  try {
    config = tune_config_from_json(json::parse(read_file(paths.config())));
  } catch (const json::exception& e) {
    throw RunError(std::string("corrupt config.json: ") + e.what());
  }
  config.harness.output_dir = run_dir;
  Optimizer optimizer = Optimizer::restore(read_file(paths.snapshot()));

  truncate_partial_line(paths.observations());
  std::ifstream log(paths.observations());
  std::size_t replayed = 0;
  for (std::string line; std::getline(log, line);) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const std::string id = j.at("suggestion_id").get<std::string>();
    const auto& outstanding = optimizer.state().outstanding;
    const bool pending = std::any_of(outstanding.begin(), outstanding.end(),
                                     [&](const auto& s) { return s.suggestion_id == id; });
    if (!pending) continue;
    const Observation obs = observation_from_json(config.optimizer.space, j);
    optimizer.observe(id, obs.output, obs.cost, obs.is_failure, obs.timestamp);
    ++replayed;
  }
  if (replayed > 0) spdlog::info("replayed {} logged observations", replayed);
  optimizer.forget_outstanding();
  fs::create_directories(paths.work());
  write_file_atomic(paths.snapshot(), optimizer.snapshot());
  return Coordinator(config, std::move(optimizer), paths).run();
}

}  // namespace carbs::harness
