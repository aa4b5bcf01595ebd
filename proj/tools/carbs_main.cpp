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

// Command-line front end: tune, resume, report, bench, and the bundled
// synthetic worker used by tests and demos.

#include "carbs/harness/bench.hpp"
#include "carbs/harness/config.hpp"
#include "carbs/harness/reports.hpp"
#include "carbs/harness/tuning_run.hpp"
#include "carbs/harness/worker_protocol.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace carbs;
using namespace carbs::harness;

void print_summary(const RunSummary& s) {
  std::cout << "run directory: " << s.run_dir.string() << "\n"
            << "observations: " << s.observations << " (" << s.failures << " failures)\n"
            << "diagnostics: " << s.diagnostics << "\n";
  if (s.cancelled > 0) std::cout << "cancelled evaluations: " << s.cancelled << "\n";
  if (s.budget_expired) std::cout << "stopped: budget expired\n";
}

int run_eval(const std::string& problem_name, const std::string& suggestion_path,
             const std::string& result_path, int sleep_ms) {
  std::ifstream in(suggestion_path);
  if (!in) {
    std::cerr << "cannot read " << suggestion_path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const SuggestionDocument doc = parse_suggestion_document(buf.str());
  const BenchProblem problem = make_problem(problem_name);
  const Vector basic = problem.space.to_basic(doc.params);
  Rng noise = derive_rng(0, std::hash<std::string>{}(doc.suggestion_id));
  const BenchOutcome out = problem.evaluate(basic, noise);
  if (sleep_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));

  const std::string text = format_observation_document({doc.suggestion_id, out.output, out.cost, out.is_failure});
  if (result_path.empty()) {
    std::cout << text << std::flush;
  } else {
    std::ofstream(result_path) << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-aware Pareto-region Bayesian hyperparameter tuner"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  auto* tune = app.add_subcommand("tune", "Start a tuning run from a config file");
  tune->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  tune->add_option("--output-dir", output_dir, "Override harness.output_dir");

  std::string run_dir;
  auto* resume = app.add_subcommand("resume", "Continue an interrupted run");
  resume->add_option("run-dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  auto* report = app.add_subcommand("report", "Regenerate the CSV reports of a run");
  report->add_option("run-dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  std::string suite, tuner_name = "carbs", table_path, log_dir;
  std::size_t seeds = 5, evaluations = 300;
  bool no_resampling = false;
  auto* bench = app.add_subcommand("bench", "Run the synthetic benchmark suite");
  bench->add_option("suite", suite, "default, all, or comma-separated problem names")->required();
  bench->add_option("--tuner", tuner_name, "carbs or random")->check(CLI::IsMember({"carbs", "random"}));
  bench->add_option("--seeds", seeds, "Seeds 0..k-1")->check(CLI::PositiveNumber);
  bench->add_option("--evaluations", evaluations, "Evaluations per run")->check(CLI::PositiveNumber);
  bench->add_option("--out", table_path, "Write the metrics table here instead of stdout");
  bench->add_option("--log-dir", log_dir, "Write one observation log per run")->check(CLI::ExistingDirectory);
  bench->add_flag("--no-resampling", no_resampling, "Disable front resampling");

  std::string problem = "sphere", suggestion_file, result_file;
  int sleep_ms = 0;
  auto* eval = app.add_subcommand("eval", "Bundled synthetic worker");
  eval->add_option("--problem", problem, "Benchmark problem")->check(CLI::IsMember(problem_names()));
  eval->add_option("--suggestion", suggestion_file, "Suggestion document")->required();
  eval->add_option("--result", result_file, "Result path (stdout when omitted)");
  eval->add_option("--sleep-ms", sleep_ms, "Delay before answering");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tune) {
      TuneConfig cfg = load_tune_config(config_path);
      if (!output_dir.empty()) cfg.harness.output_dir = output_dir;
      print_summary(run_tuning(cfg));
    } else if (*resume) {
      print_summary(resume_tuning(run_dir));
    } else if (*report) {
      const ReportFiles files = emit_reports(run_dir);
      std::cout << files.pareto_csv.string() << "\n"
                << files.scaling_csv.string() << "\n"
                << files.plotdata_csv.string() << "\n";
    } else if (*bench) {
      BenchRunOptions opts;
      opts.evaluations = evaluations;
      opts.resampling_enabled = !no_resampling;
      opts.log_path = log_dir;
      const auto runs = bench_suite(suite_problems(suite), parse_tuner(tuner_name), seeds, opts);
      const std::string table = format_metrics_table(runs);
      if (table_path.empty()) std::cout << table;
      else std::ofstream(table_path) << table;
    } else if (*eval) {
      return run_eval(problem, suggestion_file, result_file, sleep_ms);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
