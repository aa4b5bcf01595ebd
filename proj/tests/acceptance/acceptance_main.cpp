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

// Acceptance suite: one PASS/FAIL line per criterion.

#include "carbs/acquisition.hpp"
#include "carbs/gaussian_process.hpp"
#include "carbs/harness/bench.hpp"
#include "carbs/harness/subprocess.hpp"
#include "carbs/harness/tuning_run.hpp"
#include "carbs/optimizer.hpp"
#include "carbs/pareto.hpp"
#include "carbs/scaling.hpp"
#include "carbs/warp.hpp"

#include "oracles.hpp"

#include <CLI11.hpp>
#include <boost/math/distributions/normal.hpp>
#include <fmt/core.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

namespace {

using namespace carbs;
using namespace carbs::harness;
namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

const std::string kCli = CARBS_CLI_PATH;

// --- shared benchmark runs --------------------------------------------------

std::vector<BenchRun>& cost_coupled_runs(Tuner tuner) {
  static std::map<Tuner, std::vector<BenchRun>> cache;
  auto it = cache.find(tuner);
  if (it == cache.end()) {
    it = cache.emplace(tuner, bench_suite({"cost_coupled"}, tuner, 5, BenchRunOptions{300, true, {}})).first;
  }
  return it->second;
}

// --- 1 ----------------------------------------------------------------------

Outcome pareto_equivalence() {
  std::mt19937_64 rng(101);
  std::size_t mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 200;
    const int levels = 2 + static_cast<int>(rng() % 30);
    std::uniform_int_distribution<int> grid(0, levels);
    std::vector<OutputCost> pts(n);
    std::vector<Observation> obs(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i] = {double(grid(rng)), 1.0 + grid(rng)};
      if (i > 0 && rng() % 5 == 0) pts[i] = pts[rng() % i];
      obs[i].output = pts[i].output;
      obs[i].cost = pts[i].cost;
      obs[i].is_failure = rng() % 10 == 0;
    }
    if (pareto_indices(pts) != oracle::brute_front(pts)) ++mismatches;

    std::vector<OutputCost> ok;
    std::vector<std::size_t> source;
    for (std::size_t i = 0; i < n; ++i) {
      if (obs[i].is_failure) continue;
      ok.push_back(pts[i]);
      source.push_back(i);
    }
    if (!ok.empty()) {
      auto expected = oracle::brute_front(ok);
      for (auto& i : expected) i = source[i];
      if (raw_pareto(obs) != expected) ++mismatches;
    }
  }
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t configs = 1 + rng() % n;
    std::uniform_int_distribution<int> grid(0, 8);
    std::vector<Observation> obs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = rng() % configs;
      obs[i].params = {{"a", double(c)}};
      obs[i].output = double(grid(rng));
      obs[i].cost = 1.0 + double(c % 7) + 0.5 * grid(rng) * (rng() % 2);
      obs[i].is_failure = rng() % 12 == 0;
    }
    std::vector<ParamMap> got;
    const auto groups = group_observations(obs);
    for (const auto& m : grouped_pareto(groups).members) got.push_back(m.key);
    if (got != oracle::brute_grouped_front(obs)) ++mismatches;
  }
  return {mismatches == 0, fmt::format("{} mismatches over 3000 comparisons", mismatches)};
}

// --- 2 ----------------------------------------------------------------------

Outcome gp_correctness() {
  Rng rng(202);
  double worst_mean = 0.0, worst_var = 0.0;
  std::size_t likelihood_losses = 0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 10);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 49);
    Matrix x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) x(i, j) = uniform(rng, -2.0, 2.0);
    }
    Vector w(d);
    for (Eigen::Index j = 0; j < d; ++j) w(j) = standard_normal(rng);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y(i) = std::sin(x.row(i).dot(w)) + 0.3 * x(i, 0) + 0.05 * standard_normal(rng);
    }
    Matrix q(10, d);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      for (Eigen::Index j = 0; j < d; ++j) q(i, j) = uniform(rng, -2.5, 2.5);
    }
    for (const auto kind : {KernelKind::LinearPlusMatern, KernelKind::Rbf}) {
      const KernelSpec spec{kind, true};
      Hyperparameters h;
      h.linear_variance = kind == KernelKind::Rbf ? 0.0 : std::exp(uniform(rng, -4.0, 0.0));
      h.signal_variance = std::exp(uniform(rng, -1.0, 1.0));
      h.lengthscales = Vector(d);
      for (Eigen::Index j = 0; j < d; ++j) h.lengthscales(j) = std::exp(uniform(rng, -1.0, 1.5));
      h.noise_variance = std::exp(uniform(rng, -8.0, -2.0));
      const auto gp = GaussianProcess::with_hyperparameters(x, y, spec, h);
      const oracle::DenseGp ref(x, y, spec, h, gp.jitter());
      const auto post = gp.predict(q);
      for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const auto [m, v] = ref.predict(q.row(i).transpose());
        worst_mean = std::max(worst_mean, std::abs(post.mean(i) - m));
        worst_var = std::max(worst_var, std::abs(post.variance(i) - std::max(v, 0.0)));
      }

      const auto fitted = GaussianProcess::fit(x, y, spec, rng);
      const double fitted_lml =
          oracle::log_marginal_likelihood(x, y, spec, fitted.hyperparameters(), fitted.jitter());
      for (int k = 0; k < 20; ++k) {
        Hyperparameters r;
        r.linear_variance = kind == KernelKind::Rbf ? 0.0 : std::exp(uniform(rng, std::log(1e-6), std::log(1e2)));
        r.signal_variance = std::exp(uniform(rng, std::log(1e-6), std::log(1e2)));
        r.lengthscales = Vector(d);
        for (Eigen::Index j = 0; j < d; ++j) r.lengthscales(j) = std::exp(uniform(rng, std::log(1e-2), std::log(1e2)));
        r.noise_variance = std::exp(uniform(rng, std::log(1e-6), std::log(10.0)));
        const double draw = oracle::log_marginal_likelihood(x, y, spec, r, 0.0);
        if (std::isfinite(draw) && !(fitted_lml >= draw - 1e-9)) ++likelihood_losses;
      }
    }
  }
  const bool pass = worst_mean <= 1e-6 && worst_var <= 1e-6 && likelihood_losses == 0;
  return {pass, fmt::format("max |dmean| {:.2e}, max |dvar| {:.2e}, {} random draws beat the fit", worst_mean,
                            worst_var, likelihood_losses)};
}

// --- 3 ----------------------------------------------------------------------

// Stratified Monte-Carlo: one uniform draw inside each of n equal-probability
// strata of the standard normal.
double stratified_ei(double mean, double sd, double baseline, std::size_t n, Rng& rng) {
  const boost::math::normal_distribution<double> unit;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (double(i) + uniform(rng, 1e-12, 1.0 - 1e-12)) / double(n);
    sum += std::max(mean + sd * boost::math::quantile(unit, u) - baseline, 0.0);
  }
  return sum / double(n);
}

Outcome ei_closed_form() {
  Rng rng(303);
  std::size_t bad = 0, cells = 0;
  double worst = 0.0;
  for (const double sd : {0.0, 0.1, 1.0, 10.0}) {
    for (int k = 0; k <= 32; ++k) {
      const double z = -4.0 + 0.25 * k;
      const double mean = sd > 0.0 ? z * sd : z;
      const double closed = expected_improvement({mean, sd * sd}, 0.0);
      const double mc = stratified_ei(mean, sd, 0.0, 100000, rng);
      const double err = std::abs(closed - mc);
      const bool ok = closed < 1e-2 ? err <= 1e-4 : err <= 0.01 * std::abs(mc);
      worst = std::max(worst, closed < 1e-2 ? err / 1e-4 : err / (0.01 * std::abs(mc)));
      bad += !ok;
      ++cells;
    }
  }
  return {bad == 0, fmt::format("{}/{} grid cells outside tolerance, worst error {:.3f} of allowance", bad, cells, worst)};
}

// --- 4 ----------------------------------------------------------------------

Outcome p_success_check() {
  Rng rng(404);
  double worst = 0.0;
  for (const double mean : {-2.0, -0.5, 0.0, 0.3, 1.5}) {
    for (const double sd : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      const double closed = success_probability({mean, sd * sd});
      std::normal_distribution<double> f(mean, sd);
      const int n = 1000000;
      int below = 0;
      for (int i = 0; i < n; ++i) below += f(rng) < 0.0;
      worst = std::max(worst, std::abs(closed - double(below) / n));
    }
  }
  return {worst <= 0.005, fmt::format("max |closed - MC| {:.2e} over 25 cells", worst)};
}

// --- 5 ----------------------------------------------------------------------

// Asymptotic Kolmogorov distribution tail with the usual small-sample
// correction.
double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(double(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

Outcome threshold_distribution() {
  Matrix x(1, 1);
  x(0, 0) = 0.0;
  Vector y = Vector::Zero(1);
  Hyperparameters h;
  h.lengthscales = Vector::Ones(1);
  const auto flat = GaussianProcess::with_hyperparameters(x, y, {}, h);
  SurrogateModels models{flat, flat, std::nullopt, 0.0, std::nullopt, {}, 0.0};
  ParetoSet front;
  for (const double c : {1.0, 3.0, 12.0, 40.0, 100.0}) {
    ObservationGroup g;
    g.mean_cost = c;
    g.mean_output = g.max_output = std::log(c);
    g.members = {0};
    front.members.push_back(g);
  }
  Rng rng(505);
  std::vector<double> u;
  for (int i = 0; i < 10000; ++i) u.push_back(std::log(sample_threshold(front, models, rng).cost) / std::log(100.0));
  std::sort(u.begin(), u.end());
  double d = 0.0;
  const double n = double(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max({d, double(i + 1) / n - u[i], u[i] - double(i) / n});
  const double p = ks_p_value(d, u.size());
  return {p > 0.01, fmt::format("KS D = {:.4f}, p = {:.3f}", d, p)};
}

// --- 6 ----------------------------------------------------------------------

Outcome quantile_warp() {
  Rng rng(606);
  double worst_mean = 0.0, worst_sd_dev = 0.0, worst_round = 0.0;
  bool monotone = true;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> v(200);
    for (auto& s : v) {
      switch ((t + static_cast<int>(rng() % 3)) % 5) {
        case 0: s = 3.0 + 2.0 * standard_normal(rng); break;
        case 1: s = std::exponential_distribution<double>(0.5)(rng); break;
        case 2: s = std::exp(standard_normal(rng)); break;
        case 3: s = uniform(rng, -10.0, -5.0); break;
        default: s = (rng() % 2 ? 4.0 : -4.0) + 0.3 * standard_normal(rng); break;
      }
    }
    const auto w = QuantileWarp::fit(v);
    const auto z = w.warp(v);
    double mean = 0.0, sq = 0.0;
    for (double s : z) mean += s / double(z.size());
    for (double s : z) sq += (s - mean) * (s - mean) / double(z.size());
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_sd_dev = std::max(worst_sd_dev, std::abs(std::sqrt(sq) - 1.0));
    for (double s : v) worst_round = std::max(worst_round, std::abs(w.unwarp(w.warp(s)) - s));

    std::vector<double> grid = v;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    // Interior points only: within a rounding error of the extremes the
    // level clip makes the map flat.
    for (int k = 1; k < 2000; ++k) grid.push_back(*lo + (*hi - *lo) * k / 2000.0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (std::size_t i = 1; i < grid.size(); ++i) monotone = monotone && w.warp(grid[i]) > w.warp(grid[i - 1]);
  }
  const bool pass = worst_mean < 0.1 && worst_sd_dev <= 0.2 && monotone && worst_round <= 1e-9;
  return {pass, fmt::format("max |mean| {:.3f}, max |sd - 1| {:.3f}, monotone {}, round trip {:.1e}", worst_mean,
                            worst_sd_dev, monotone, worst_round)};
}

// --- 7 ----------------------------------------------------------------------

Outcome resampling_schedule() {
  const auto problem = make_problem("cost_coupled");
  auto cfg = carbs_bench_config(problem, 7);
  cfg.n_resample = 4;
  Optimizer opt(cfg);
  Rng noise(0);
  std::size_t resamples = 0, mismatched = 0, post_bootstrap = 0;
  while (post_bootstrap < 200) {
    const ParetoSet before = opt.pareto_front();
    const auto s = opt.suggest();
    const bool bootstrap = s.metadata.kind == SuggestionKind::Bootstrap;
    if (!bootstrap) {
      ++post_bootstrap;
      if (s.is_resample) {
        ++resamples;
        const bool found = std::any_of(before.members.begin(), before.members.end(),
                                       [&](const auto& m) { return m.key == s.params; });
        mismatched += !found;
      }
    }
    const auto out = problem.evaluate(cfg.space.to_basic(s.params), noise);
    opt.observe(s.suggestion_id, out.output, out.cost, out.is_failure);
  }
  return {resamples == 50 && mismatched == 0,
          fmt::format("{} resamples in 200, {} not matching a front member", resamples, mismatched)};
}

// --- 8 ----------------------------------------------------------------------

Outcome cost_coupled_benchmark() {
  const auto& carbs_runs = cost_coupled_runs(Tuner::Carbs);
  const auto& random_runs = cost_coupled_runs(Tuner::Random);
  std::string deciles;
  bool every_decile = true;
  for (int dec = 4; dec <= 10; ++dec) {
    const std::size_t idx = 300 * dec / 10 - 1;
    std::vector<double> c, r;
    for (const auto& run : carbs_runs) c.push_back(run.best_so_far.at(idx));
    for (const auto& run : random_runs) r.push_back(run.best_so_far.at(idx));
    const double mc = median(c), mr = median(r);
    every_decile = every_decile && mc > mr;
    deciles += fmt::format(" {}0%:{:.3f}/{:.3f}", dec, mc, mr);
  }
  int dominating = 0;
  for (std::size_t s = 0; s < carbs_runs.size(); ++s) {
    dominating += front_dominates(carbs_runs[s].front, random_runs[s].front);
  }
  return {every_decile && dominating >= 4,
          fmt::format("median best carbs/random{}; front dominates on {}/5 seeds", deciles, dominating)};
}

// --- 9 ----------------------------------------------------------------------

Outcome scaling_recovery() {
  const auto problem = make_problem("cost_coupled");
  int recovered = 0;
  std::string slopes;
  for (const auto& run : cost_coupled_runs(Tuner::Carbs)) {
    bool ok = true;
    try {
      const auto fit = fit_scaling(problem.space, run.front);
      slopes += " [";
      for (const auto& p : fit.params) {
        if (p.name.rfind("size", 0) == 0) continue;
        ok = ok && std::abs(p.slope - 0.5) <= 0.1;
        slopes += fmt::format(" {:.3f}", p.slope);
      }
      slopes += " ]";
    } catch (const ScalingError& e) {
      ok = false;
      slopes += fmt::format(" [{}]", e.what());
    }
    recovered += ok;
  }
  return {recovered >= 4, fmt::format("slope within 0.5 +/- 20% on {}/5 seeds:{}", recovered, slopes)};
}

// --- 10 ---------------------------------------------------------------------

Outcome failure_avoidance() {
  const auto problem = make_problem("failure_region");
  std::vector<double> fractions, random_fractions;
  const auto fraction = [&](const BenchRun& run) {
    int failing = 0;
    for (std::size_t i = 99; i < 200; ++i) failing += problem.fails(run.observations[i].basic);
    return failing / 101.0;
  };
  for (const auto& run : bench_suite({"failure_region"}, Tuner::Carbs, 5, BenchRunOptions{200, true, {}})) {
    fractions.push_back(fraction(run));
  }
  for (const auto& run : bench_suite({"failure_region"}, Tuner::Random, 5, BenchRunOptions{200, true, {}})) {
    random_fractions.push_back(fraction(run));
  }
  const double m = median(fractions);
  return {m < 0.15, fmt::format("median failing fraction {:.3f} (random {:.3f})", m, median(random_fractions))};
}

// --- 11 ---------------------------------------------------------------------

double variance(const std::vector<double>& v) {
  double mean = 0.0, sq = 0.0;
  for (double x : v) mean += x / double(v.size());
  for (double x : v) sq += (x - mean) * (x - mean);
  return sq / double(v.size() - 1);
}

Outcome resampling_ablation() {
  std::vector<double> on, off;
  for (const auto& run : bench_suite({"noisy_cost_coupled"}, Tuner::Carbs, 5, BenchRunOptions{300, true, {}})) {
    on.push_back(run.final_true_best);
  }
  for (const auto& run : bench_suite({"noisy_cost_coupled"}, Tuner::Carbs, 5, BenchRunOptions{300, false, {}})) {
    off.push_back(run.final_true_best);
  }
  const double von = variance(on), voff = variance(off);
  return {voff >= 1.5 * von, fmt::format("variance of final true best: off {:.4f}, on {:.4f}, ratio {:.2f}", voff,
                                         von, von > 0.0 ? voff / von : kInfinity)};
}

// --- 12 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

std::size_t complete_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

Outcome determinism_and_resume() {
  const fs::path dir = fs::temp_directory_path() / ("carbs_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);

  const auto sphere = make_problem("sphere");
  run_benchmark(sphere, Tuner::Carbs, 12, BenchRunOptions{60, true, dir / "a.jsonl"});
  run_benchmark(sphere, Tuner::Carbs, 12, BenchRunOptions{60, true, dir / "b.jsonl"});
  const std::string a = slurp(dir / "a.jsonl");
  const bool identical = !a.empty() && a == slurp(dir / "b.jsonl");

  std::ostringstream config;
  config << "[search_space]\nname space_type search_center min max\n";
  for (std::size_t i = 0; i < sphere.space.dimension(); ++i) {
    const auto& s = sphere.space.spec(i);
    config << fmt::format("{} {} {} {} {}\n", s.name, to_string(s.space_type), s.search_center, s.min_bound,
                          s.max_bound);
  }
  config << "\n[optimizer]\nseed = 12\n\n[harness]\nparallelism = 2\nbudget_seconds = 100\nmax_evaluations = 40\n"
         << "output_dir = run\nworker_command = \"" << kCli
         << " eval --problem sphere --suggestion {suggestion} --result {result} --sleep-ms 150\"\n";
  std::ofstream(dir / "tune.cfg") << config.str();

  const fs::path run = dir / "run";
  SpawnOptions quiet;
  quiet.stdout_path = dir / "tune.stdout";
  quiet.stderr_path = dir / "tune.stderr";
  auto tune = Subprocess::spawn(kCli + " tune " + (dir / "tune.cfg").string(), quiet);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
  while (complete_lines(slurp(run / "observations.jsonl")) < 12 && std::chrono::steady_clock::now() < deadline &&
         !tune.poll()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  tune.kill();
  std::string prefix = slurp(run / "observations.jsonl");
  prefix.resize(prefix.rfind('\n') + 1);
  const std::size_t before = complete_lines(prefix);

  auto resume = Subprocess::spawn(kCli + " resume " + run.string(), quiet);
  const bool resumed = resume.wait().success();
  const std::string after = slurp(run / "observations.jsonl");
  std::set<std::string> ids;
  std::size_t records = 0;
  bool parsed = true;
  std::istringstream lines(after);
  for (std::string l; std::getline(lines, l); ++records) {
    try {
      ids.insert(json::parse(l).at("suggestion_id").get<std::string>());
    } catch (const std::exception&) {
      parsed = false;
    }
  }
  const bool prefix_kept = after.compare(0, prefix.size(), prefix) == 0;
  fs::remove_all(dir);
  const bool pass =
      identical && resumed && before >= 12 && prefix_kept && parsed && ids.size() == records && records > before;
  return {pass, fmt::format("bench logs identical {}; killed after {} records, resume exit ok {}, prefix kept {}, "
                            "{} records with {} distinct ids",
                            identical, before, resumed, prefix_kept, records, ids.size())};
}

struct Criterion {
  int number;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  app.add_option("criteria", only, "Criterion numbers to run (default: all)");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::err);

  const std::vector<Criterion> criteria{
      {1, "pareto oracle equivalence", 10, pareto_equivalence},
      {2, "gp numerical correctness", 60, gp_correctness},
      {3, "ei closed form", 10, ei_closed_form},
      {4, "p_success closed form", 5, p_success_check},
      {5, "threshold log-uniformity", 5, threshold_distribution},
      {6, "quantile warp", 5, quantile_warp},
      {7, "resampling schedule", 30, resampling_schedule},
      {8, "cost-coupled benchmark", 600, cost_coupled_benchmark},
      {9, "scaling-law recovery", 60, scaling_recovery},
      {10, "failure avoidance", 600, failure_avoidance},
      {11, "resampling ablation", 900, resampling_ablation},
      {12, "determinism and resume", 120, determinism_and_resume},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.number) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    fmt::print("criterion {:>2} {:<28} {}  {:.1f}s/{:.0f}s  {}{}\n", c.number, c.name, pass ? "PASS" : "FAIL", secs,
               c.limit_seconds, o.detail, in_time ? "" : " (over time limit)");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
