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
#include "carbs/random.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace carbs::harness {

struct BenchOutcome {
  double output = 0.0;
  double cost = 1.0;
  bool is_failure = false;
};

/// A synthetic tuning problem defined on the basic coordinates of its space.
struct BenchProblem {
  std::string name;
  SearchSpace space;
  /// noise is consumed only by noisy problems.
  std::function<BenchOutcome(const Vector& basic, Rng& noise)> evaluate;
  /// Noise-free output.
  std::function<double(const Vector& basic)> true_output;
  std::function<bool(const Vector& basic)> fails;
  /// Output level used for the observations-to-threshold metric.
  double target_output = 0.0;

  std::size_t dimension() const { return space.dimension(); }
};

/// sphere, cost_coupled, failure_region, noisy_cost_coupled.
std::vector<std::string> problem_names();
/// Throws std::invalid_argument for unknown names.
BenchProblem make_problem(const std::string& name);
/// "default" (sphere, cost_coupled, failure_region), "all", or a
/// comma-separated list of problem names.
std::vector<std::string> suite_problems(const std::string& suite);

enum class Tuner { Carbs, Random };
std::string_view to_string(Tuner tuner);
Tuner parse_tuner(std::string_view text);

/// Uniform sampling over the basic box, mapped to natural values.
class RandomSearch {
 public:
  RandomSearch(SearchSpace space, std::uint64_t seed);
  ParamMap suggest();

 private:
  SearchSpace space_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

struct BenchRunOptions {
  std::size_t evaluations = 300;
  bool resampling_enabled = true;
  /// Writes the observation log here when non-empty.
  std::filesystem::path log_path;
};

struct BenchRun {
  std::string problem;
  Tuner tuner = Tuner::Carbs;
  std::uint64_t seed = 0;
  /// In evaluation order; timestamps are cumulative cost.
  std::vector<Observation> observations;
  /// Best observed output after each evaluation (-inf before a success).
  std::vector<double> best_so_far;
  ParetoSet front;
  std::optional<std::size_t> evals_to_target;
  /// Noise-free output of the front group with the best effective output.
  double final_true_best = -kInfinity;
  double total_cost = 0.0;
};

OptimizerConfig carbs_bench_config(const BenchProblem& problem, std::uint64_t seed);

/// Sequential evaluation loop; deterministic given the seed.
BenchRun run_benchmark(const BenchProblem& problem, Tuner tuner, std::uint64_t seed,
                       const BenchRunOptions& options = {});

std::vector<BenchRun> bench_suite(const std::vector<std::string>& problems, Tuner tuner,
                                  std::size_t seeds, const BenchRunOptions& options = {});

/// CSV with one row per run and one median row per problem.
std::string format_metrics_table(const std::vector<BenchRun>& runs);

/// True when every member of `other` at or above the cheapest cost of
/// `front` is weakly dominated by a member of `front`.
bool front_dominates(const ParetoSet& front, const ParetoSet& other);

double median(std::vector<double> values);

}  // namespace carbs::harness
