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

#include "carbs/gaussian_process.hpp"
#include "carbs/pareto.hpp"
#include "carbs/random.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace carbs {

enum class AcquisitionMode {
  /// Baseline max(pareto value, threshold value); the default.
  EiThreshold,
  /// Baseline is the Pareto value at the predicted cost ("no clamping").
  EiPareto,
  /// Baseline is the best observed warped output ("no Pareto").
  EiMax,
};

std::string_view to_string(AcquisitionMode mode);
AcquisitionMode parse_acquisition_mode(std::string_view text);

struct Candidate {
  Vector basic;
  /// Index of the front member the candidate was drawn around.
  std::size_t origin = 0;
  double search_density = 1.0;
};

struct ScoredCandidate {
  Candidate candidate;
  double predicted_cost = 0.0;
  double pareto_value = 0.0;
  double threshold_value = 0.0;
  double output_mean = 0.0;
  double output_variance = 0.0;
  double ei = 0.0;
  double p_success = 1.0;
  double score = 0.0;
};

/// Affine map of (optionally log) costs onto a standardised modelling scale.
struct CostTransform {
  bool log_space = true;
  double shift = 0.0;
  double scale = 1.0;

  static CostTransform fit(std::span<const double> costs, bool log_space);
  double to_model(double cost) const;
  double from_model(double value) const;
};

/// The fitted surrogates used to score one suggestion round.
struct SurrogateModels {
  GaussianProcess output;
  GaussianProcess cost;
  /// Front model over model-space cost; absent for a one-member front, in
  /// which case pareto_constant is the front value everywhere.
  std::optional<GaussianProcess> pareto;
  double pareto_constant = 0.0;
  std::optional<GaussianProcess> failure;
  CostTransform cost_transform;
  /// Largest warped output observed.
  double best_output = 0.0;
};

struct ParetoBaseline {
  double predicted_cost = 0.0;
  double pareto_value = 0.0;
};

struct ThresholdSample {
  double cost = 0.0;
  double value = 0.0;
};

struct AcquisitionConfig {
  AcquisitionMode mode = AcquisitionMode::EiThreshold;
  double cost_ceiling = kInfinity;
};

struct Selection {
  ScoredCandidate best;
  ThresholdSample threshold;
  /// Set when every candidate exceeded the cost ceiling and the cheapest
  /// one was returned instead.
  bool cost_ceiling_fallback = false;
  std::size_t surviving = 0;
};

/// max over centers of exp(-|c - x|^2 / (2 sigma^2)).
double search_density(const Vector& x, std::span<const Vector> centers, double sigma);

/// n_per_member isotropic Gaussian draws around each center, reduced evenly
/// so that no more than max_total are produced.
std::vector<Candidate> generate_candidates(std::span<const Vector> centers, double sigma,
                                           std::size_t n_per_member, std::size_t max_total, Rng& rng);

/// E[max(f - baseline, 0)] for f ~ N(mean, variance).
double expected_improvement(const Posterior& posterior, double baseline);

/// P(f < 0) for f ~ N(mean, variance); a step function when variance is 0.
double success_probability(const Posterior& failure_posterior);

/// Success probability at a basic point; 1 without a failure model.
double p_success(const std::optional<GaussianProcess>& failure, const Vector& basic);

ParetoBaseline pareto_baseline(const SurrogateModels& models, const Vector& basic);

/// Draws c_th log-uniformly between the cheapest and the most expensive
/// front member and evaluates the front model there.
ThresholdSample sample_threshold(const ParetoSet& pareto, const SurrogateModels& models, Rng& rng);

Selection score_and_select(std::span<const Candidate> candidates, const SurrogateModels& models,
                           const ParetoSet& pareto, const AcquisitionConfig& config, Rng& rng);

}  // namespace carbs
