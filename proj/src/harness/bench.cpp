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

#include "carbs/harness/bench.hpp"

#include "carbs/harness/reports.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace carbs::harness {
namespace {

constexpr std::uint64_t kNoiseSalt = 0x6e6f697365ULL;

constexpr std::array<double, 4> kSphereOptimum{0.8, -0.6, 0.4, -1.0};
constexpr std::array<double, 4> kCoupledCenters{1.0, -1.0, 0.5, -0.5};
/// Failure when the first coupled parameter's basic value exceeds this;
/// 40% of its [-3, 3] range.
constexpr double kFailureEdge = 0.6;
constexpr double kNoiseStd = 0.5;

BenchProblem sphere() {
  std::vector<ParamSpec> specs;
  for (std::size_t i = 0; i < kSphereOptimum.size(); ++i) {
    specs.push_back({"x" + std::to_string(i), SpaceType::Linear, 0.0, -3.0, 3.0});
  }
  BenchProblem p;
  p.name = "sphere";
  p.space = SearchSpace(std::move(specs));
  p.true_output = [](const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kSphereOptimum.size(); ++i) {
      const double d = b(static_cast<Eigen::Index>(i)) - kSphereOptimum[i];
      s += d * d;
    }
    return -s;
  };
  p.fails = [](const Vector&) { return false; };
  p.evaluate = [f = p.true_output](const Vector& b, Rng&) { return BenchOutcome{f(b), 1.0, false}; };
  p.target_output = -0.1;
  return p;
}

// Two log-scale size parameters set the cost c = size1 * size2; the best
// value of every other parameter moves as 0.5 * ln c, and larger runs pay
// off through the tanh gain.
BenchProblem cost_coupled() {
  std::vector<ParamSpec> specs;
  for (const char* name : {"size1", "size2"}) {
    specs.push_back({name, SpaceType::Log, 1.0, std::exp(-3.0), std::exp(3.0)});
  }
  for (std::size_t k = 0; k < kCoupledCenters.size(); ++k) {
    const double c = kCoupledCenters[k];
    specs.push_back({"h" + std::to_string(k), SpaceType::Linear, c, c - 3.0, c + 3.0});
  }
  BenchProblem p;
  p.name = "cost_coupled";
  p.space = SearchSpace(std::move(specs));
  p.true_output = [](const Vector& b) {
    const double u = b(0) + b(1);
    double penalty = 0.0;
    for (std::size_t k = 0; k < kCoupledCenters.size(); ++k) {
      const double h = b(static_cast<Eigen::Index>(k + 2)) + kCoupledCenters[k];
      penalty += (h - 0.5 * u) * (h - 0.5 * u);
    }
    return 2.0 * std::tanh(0.5 * u) - penalty;
  };
  p.fails = [](const Vector&) { return false; };
  p.evaluate = [f = p.true_output](const Vector& b, Rng&) {
    return BenchOutcome{f(b), std::exp(b(0) + b(1)), false};
  };
  p.target_output = 1.5;
  return p;
}

BenchProblem failure_region() {
  BenchProblem p = cost_coupled();
  p.name = "failure_region";
  p.fails = [](const Vector& b) { return b(2) > kFailureEdge; };
  p.evaluate = [f = p.true_output, fails = p.fails](const Vector& b, Rng&) {
    const double cost = std::exp(b(0) + b(1));
    if (fails(b)) return BenchOutcome{std::nan(""), 0.5 * cost, true};
    return BenchOutcome{f(b), cost, false};
  };
  return p;
}

BenchProblem noisy_cost_coupled() {
  BenchProblem p = cost_coupled();
  p.name = "noisy_cost_coupled";
  p.evaluate = [f = p.true_output](const Vector& b, Rng& noise) {
    return BenchOutcome{f(b) + kNoiseStd * standard_normal(noise), std::exp(b(0) + b(1)), false};
  };
  return p;
}

}  // namespace

std::vector<std::string> problem_names() {
  return {"sphere", "cost_coupled", "failure_region", "noisy_cost_coupled"};
}

BenchProblem make_problem(const std::string& name) {
  if (name == "sphere") return sphere();
  if (name == "cost_coupled") return cost_coupled();
  if (name == "failure_region") return failure_region();
  if (name == "noisy_cost_coupled") return noisy_cost_coupled();
  throw std::invalid_argument("unknown benchmark problem '" + name + "'");
}

std::vector<std::string> suite_problems(const std::string& suite) {
  if (suite == "default") return {"sphere", "cost_coupled", "failure_region"};
  if (suite == "all") return problem_names();
  std::vector<std::string> out;
  std::stringstream in(suite);
  for (std::string name; std::getline(in, name, ',');) {
    make_problem(name);
    out.push_back(name);
  }
  if (out.empty()) throw std::invalid_argument("empty benchmark suite");
  return out;
}

std::string_view to_string(Tuner tuner) { return tuner == Tuner::Carbs ? "carbs" : "random"; }

Tuner parse_tuner(std::string_view text) {
  if (text == "carbs") return Tuner::Carbs;
  if (text == "random") return Tuner::Random;
  throw std::invalid_argument("unknown tuner '" + std::string(text) + "'");
}

RandomSearch::RandomSearch(SearchSpace space, std::uint64_t seed) : space_(std::move(space)), seed_(seed) {}

ParamMap RandomSearch::suggest() {
  Rng rng = derive_rng(seed_, counter_++);
  const Vector lo = space_.basic_lower();
  const Vector hi = space_.basic_upper();
  Vector x(lo.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // Unbounded coordinates are sampled within 3 units of the center.
    const double a = std::isfinite(lo(i)) ? lo(i) : -3.0;
    const double b = std::isfinite(hi(i)) ? hi(i) : 3.0;
    x(i) = uniform(rng, a, b);
  }
  return space_.from_basic(x);
}

OptimizerConfig carbs_bench_config(const BenchProblem& problem, std::uint64_t seed) {
  OptimizerConfig c;
  c.space = problem.space;
  c.seed = seed;
  return c;
}

BenchRun run_benchmark(const BenchProblem& problem, Tuner tuner, std::uint64_t seed,
                       const BenchRunOptions& options) {
  BenchRun run;
  run.problem = problem.name;
  run.tuner = tuner;
  run.seed = seed;

  std::optional<Optimizer> carbs;
  std::optional<RandomSearch> random;
  if (tuner == Tuner::Carbs) {
    OptimizerConfig c = carbs_bench_config(problem, seed);
    c.resampling_enabled = options.resampling_enabled;
    carbs.emplace(std::move(c));
  } else {
    random.emplace(problem.space, seed);
  }

  std::ofstream log;
  if (!options.log_path.empty()) log.open(options.log_path, std::ios::trunc);

  double best = -kInfinity;
  for (std::size_t e = 0; e < options.evaluations; ++e) {
    std::string id;
    ParamMap params;
    if (carbs) {
      Suggestion s = carbs->suggest();
      id = std::move(s.suggestion_id);
      params = std::move(s.params);
    } else {
      id = std::to_string(e);
      params = random->suggest();
    }
    const Vector basic = problem.space.to_basic(params);
    Rng noise = derive_rng(seed, e, kNoiseSalt);
    const BenchOutcome out = problem.evaluate(basic, noise);
    run.total_cost += out.cost;

    Observation obs;
    if (carbs) {
      obs = carbs->observe(id, out.output, out.cost, out.is_failure, run.total_cost);
    } else {
      obs.suggestion_id = id;
      obs.params = params;
      obs.basic = basic;
      obs.output = out.output;
      obs.cost = out.cost;
      obs.is_failure = out.is_failure;
      obs.sequence = static_cast<std::int64_t>(e);
      obs.timestamp = run.total_cost;
    }
    if (log.is_open()) log << observation_to_json(problem.space, obs).dump() << "\n";
    if (!obs.is_failure) {
      best = std::max(best, obs.output);
      if (!run.evals_to_target && obs.output >= problem.target_output) run.evals_to_target = e + 1;
    }
    run.best_so_far.push_back(best);
    run.observations.push_back(std::move(obs));
  }

  run.front = report_front(run.observations);
  const ObservationGroup* top = nullptr;
  for (const auto& m : run.front.members) {
    if (top == nullptr || m.effective_output() > top->effective_output()) top = &m;
  }
  if (top != nullptr) run.final_true_best = problem.true_output(top->basic);
  return run;
}

std::vector<BenchRun> bench_suite(const std::vector<std::string>& problems, Tuner tuner,
                                  std::size_t seeds, const BenchRunOptions& options) {
  std::vector<BenchRun> runs;
  for (const auto& name : problems) {
    const BenchProblem problem = make_problem(name);
    for (std::size_t s = 0; s < seeds; ++s) {
      BenchRunOptions opts = options;
      if (!options.log_path.empty()) {
        opts.log_path = options.log_path / fmt::format("{}_{}_{}.jsonl", name, to_string(tuner), s);
      }
      runs.push_back(run_benchmark(problem, tuner, s, opts));
    }
  }
  return runs;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string format_metrics_table(const std::vector<BenchRun>& runs) {
  const auto g = [](double v) { return fmt::format("{:.10g}", v); };
  std::ostringstream out;
  out << "problem,tuner,seed,evaluations,best_output,true_best_output,evals_to_target,front_size,total_cost\n";
  std::map<std::string, std::vector<const BenchRun*>> by_problem;
  std::vector<std::string> order;
  for (const auto& r : runs) {
    if (!by_problem.count(r.problem)) order.push_back(r.problem);
    by_problem[r.problem].push_back(&r);
    out << r.problem << "," << to_string(r.tuner) << "," << r.seed << "," << r.observations.size() << ","
        << g(r.best_so_far.empty() ? -kInfinity : r.best_so_far.back()) << "," << g(r.final_true_best)
        << "," << (r.evals_to_target ? std::to_string(*r.evals_to_target) : std::string()) << ","
        << r.front.size() << "," << g(r.total_cost) << "\n";
  }
  for (const auto& name : order) {
    const auto& rs = by_problem[name];
    std::vector<double> best, truth, hit, size, cost;
    for (const auto* r : rs) {
      best.push_back(r->best_so_far.empty() ? -kInfinity : r->best_so_far.back());
      truth.push_back(r->final_true_best);
      // Runs that never reach the target count as one past the budget.
      hit.push_back(r->evals_to_target ? static_cast<double>(*r->evals_to_target)
                                       : static_cast<double>(r->observations.size() + 1));
      size.push_back(static_cast<double>(r->front.size()));
      cost.push_back(r->total_cost);
    }
    out << name << "," << to_string(rs.front()->tuner) << ",median," << rs.front()->observations.size()
        << "," << g(median(best)) << "," << g(median(truth)) << "," << g(median(hit)) << ","
        << g(median(size)) << "," << g(median(cost)) << "\n";
  }
  return out.str();
}

bool front_dominates(const ParetoSet& front, const ParetoSet& other) {
  if (front.empty()) return false;
  double cheapest = kInfinity;
  for (const auto& m : front.members) cheapest = std::min(cheapest, m.mean_cost);
  for (const auto& o : other.members) {
    if (o.mean_cost < cheapest) continue;
    const bool covered = std::any_of(front.members.begin(), front.members.end(), [&](const auto& m) {
      return m.effective_output() >= o.effective_output() && m.mean_cost <= o.mean_cost;
    });
    if (!covered) return false;
  }
  return true;
}

}  // namespace carbs::harness
