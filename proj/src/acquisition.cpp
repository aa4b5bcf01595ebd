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

#include "carbs/acquisition.hpp"

#include "carbs/normal.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace carbs {

std::string_view to_string(AcquisitionMode mode) {
  switch (mode) {
    case AcquisitionMode::EiThreshold:
      return "EI-th";
    case AcquisitionMode::EiPareto:
      return "EI-pf";
    case AcquisitionMode::EiMax:
      return "EI-max";
  }
  return "EI-th";
}

AcquisitionMode parse_acquisition_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::replace(lower.begin(), lower.end(), '_', '-');
  if (lower == "ei-th") return AcquisitionMode::EiThreshold;
  if (lower == "ei-pf") return AcquisitionMode::EiPareto;
  if (lower == "ei-max") return AcquisitionMode::EiMax;
  throw std::invalid_argument("unknown acquisition mode '" + std::string(text) + "'");
}

CostTransform CostTransform::fit(std::span<const double> costs, bool log_space) {
  CostTransform t;
  t.log_space = log_space;
  if (costs.empty()) return t;
  double sum = 0.0;
  for (double c : costs) sum += log_space ? std::log(c) : c;
  t.shift = sum / static_cast<double>(costs.size());
  double sq = 0.0;
  for (double c : costs) {
    const double v = (log_space ? std::log(c) : c) - t.shift;
    sq += v * v;
  }
  const double sd = std::sqrt(sq / static_cast<double>(costs.size()));
  t.scale = sd > 1e-12 ? sd : 1.0;
  return t;
}

double CostTransform::to_model(double cost) const {
  return ((log_space ? std::log(cost) : cost) - shift) / scale;
}

double CostTransform::from_model(double value) const {
  const double v = value * scale + shift;
  return log_space ? std::exp(v) : v;
}

double search_density(const Vector& x, std::span<const Vector> centers, double sigma) {
  double nearest = kInfinity;
  for (const auto& c : centers) nearest = std::min(nearest, (c - x).squaredNorm());
  if (!std::isfinite(nearest)) return 0.0;
  return std::exp(-nearest / (2.0 * sigma * sigma));
}

std::vector<Candidate> generate_candidates(std::span<const Vector> centers, double sigma,
                                           std::size_t n_per_member, std::size_t max_total,
                                           Rng& rng) {
  if (centers.empty()) throw std::invalid_argument("candidate generation needs a front member");
  if (!(sigma > 0.0)) throw std::invalid_argument("search radius must be positive");
  const std::size_t per_member =
      std::max<std::size_t>(1, std::min(n_per_member, max_total / centers.size()));
  std::vector<Candidate> out;
  out.reserve(per_member * centers.size());
  for (std::size_t m = 0; m < centers.size(); ++m) {
    for (std::size_t k = 0; k < per_member; ++k) {
      Candidate c;
      c.basic = centers[m];
      for (Eigen::Index i = 0; i < c.basic.size(); ++i) c.basic(i) += sigma * standard_normal(rng);
      c.origin = m;
      c.search_density = search_density(c.basic, centers, sigma);
      out.push_back(std::move(c));
    }
  }
  return out;
}

double expected_improvement(const Posterior& posterior, double baseline) {
  const double diff = posterior.mean - baseline;
  const double sd = std::sqrt(std::max(posterior.variance, 0.0));
  if (sd <= 0.0) return std::max(diff, 0.0);
  const double z = diff / sd;
  return std::max(diff * normal_cdf(z) + sd * normal_pdf(z), 0.0);
}

double success_probability(const Posterior& failure_posterior) {
  const double sd = std::sqrt(std::max(failure_posterior.variance, 0.0));
  if (sd <= 0.0) {
    if (failure_posterior.mean < 0.0) return 1.0;
    return failure_posterior.mean > 0.0 ? 0.0 : 0.5;
  }
  return normal_cdf(-failure_posterior.mean / sd);
}

double p_success(const std::optional<GaussianProcess>& failure, const Vector& basic) {
  if (!failure) return 1.0;
  return success_probability(failure->predict(basic));
}

ParetoBaseline pareto_baseline(const SurrogateModels& models, const Vector& basic) {
  const double model_cost = models.cost.predict(basic).mean;
  ParetoBaseline out;
  out.predicted_cost = models.cost_transform.from_model(model_cost);
  out.pareto_value = models.pareto ? models.pareto->predict(Vector(Vector::Constant(1, model_cost))).mean
                                   : models.pareto_constant;
  return out;
}

ThresholdSample sample_threshold(const ParetoSet& pareto, const SurrogateModels& models, Rng& rng) {
  if (pareto.empty()) throw std::invalid_argument("threshold sampling needs a non-empty front");
  double lo = kInfinity, hi = 0.0;
  for (const auto& m : pareto.members) {
    lo = std::min(lo, m.mean_cost);
    hi = std::max(hi, m.mean_cost);
  }
  ThresholdSample out;
  out.cost = lo < hi ? std::exp(uniform(rng, std::log(lo), std::log(hi))) : lo;
  out.value = models.pareto
                  ? models.pareto->predict(Vector(Vector::Constant(1, models.cost_transform.to_model(out.cost)))).mean
                  : models.pareto_constant;
  return out;
}

Selection score_and_select(std::span<const Candidate> candidates, const SurrogateModels& models,
                           const ParetoSet& pareto, const AcquisitionConfig& config, Rng& rng) {
  if (candidates.empty()) throw std::invalid_argument("no candidates to score");
  const auto m = static_cast<Eigen::Index>(candidates.size());
  const auto d = candidates.front().basic.size();
  Matrix x(m, d);
  for (Eigen::Index i = 0; i < m; ++i) x.row(i) = candidates[static_cast<std::size_t>(i)].basic;

  Selection sel;
  sel.threshold = sample_threshold(pareto, models, rng);

  const PosteriorBatch output = models.output.predict(x);
  const Vector model_cost = models.cost.predict(x).mean;
  Vector pareto_value = Vector::Constant(m, models.pareto_constant);
  if (models.pareto) pareto_value = models.pareto->predict(Matrix(model_cost)).mean;
  PosteriorBatch failure;
  if (models.failure) failure = models.failure->predict(x);

  std::vector<ScoredCandidate> scored(candidates.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    auto& s = scored[static_cast<std::size_t>(i)];
    s.candidate = candidates[static_cast<std::size_t>(i)];
    s.predicted_cost = models.cost_transform.from_model(model_cost(i));
    s.pareto_value = pareto_value(i);
    s.threshold_value = sel.threshold.value;
    s.output_mean = output.mean(i);
    s.output_variance = output.variance(i);
    double baseline = 0.0;
    switch (config.mode) {
      case AcquisitionMode::EiThreshold:
        baseline = std::max(s.pareto_value, s.threshold_value);
        break;
      case AcquisitionMode::EiPareto:
        baseline = s.pareto_value;
        break;
      case AcquisitionMode::EiMax:
        baseline = models.best_output;
        break;
    }
    s.ei = expected_improvement({s.output_mean, s.output_variance}, baseline);
    s.p_success = models.failure ? success_probability({failure.mean(i), failure.variance(i)}) : 1.0;
    s.score = s.ei * s.candidate.search_density * s.p_success;
  }

  const ScoredCandidate* best = nullptr;
  for (const auto& s : scored) {
    if (s.predicted_cost > config.cost_ceiling) continue;
    ++sel.surviving;
    if (best == nullptr || s.score > best->score) best = &s;
  }
  if (best == nullptr) {
    sel.cost_ceiling_fallback = true;
    for (const auto& s : scored) {
      if (best == nullptr || s.predicted_cost < best->predicted_cost) best = &s;
    }
  }
  sel.best = *best;
  return sel;
}

}  // namespace carbs
