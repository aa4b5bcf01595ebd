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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace carbs {
namespace {

GaussianProcess gp_1d(std::vector<double> xs, std::vector<double> ys, double signal = 1.0,
                      double noise = 1e-6, KernelKind kind = KernelKind::LinearPlusMatern) {
  Matrix x(static_cast<Eigen::Index>(xs.size()), 1);
  Vector y(static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = xs[i];
    y(static_cast<Eigen::Index>(i)) = ys[i];
  }
  Hyperparameters h;
  h.linear_variance = kind == KernelKind::Rbf ? 0.0 : 0.01;
  h.signal_variance = signal;
  h.lengthscales = Vector::Constant(1, 1.0);
  h.noise_variance = noise;
  return GaussianProcess::with_hyperparameters(x, y, {kind, true}, h);
}

ObservationGroup member(double cost, double output) {
  ObservationGroup g;
  g.mean_cost = cost;
  g.mean_output = g.max_output = output;
  g.members = {0};
  return g;
}

SurrogateModels flat_models() {
  SurrogateModels m{gp_1d({0.0}, {0.0}), gp_1d({0.0}, {0.0}), std::nullopt, 0.0, std::nullopt, {}, 0.0};
  m.cost_transform = CostTransform{false, 1.0, 1.0};
  return m;
}

TEST(Acquisition, SearchDensityAtFrontPointIsOne) {
  const std::vector<Vector> centers{Vector::Zero(3)};
  EXPECT_DOUBLE_EQ(search_density(Vector::Zero(3), centers, 0.3), 1.0);
}

TEST(Acquisition, SearchDensityAtOneSigma) {
  const std::vector<Vector> centers{Vector::Zero(2), Vector::Constant(2, 10.0)};
  Vector x = Vector::Zero(2);
  x(1) = 0.3;
  EXPECT_NEAR(search_density(x, centers, 0.3), std::exp(-0.5), 1e-12);
  EXPECT_NEAR(search_density(x, centers, 0.3), 0.6065, 1e-4);
}

TEST(Acquisition, CandidateSpreadMatchesSigma) {
  const std::vector<Vector> centers{Vector::Constant(3, 1.0)};
  Rng rng(1);
  const auto c = generate_candidates(centers, 0.3, 10000, 10000, rng);
  ASSERT_EQ(c.size(), 10000u);
  for (Eigen::Index d = 0; d < 3; ++d) {
    double s = 0.0, s2 = 0.0;
    for (const auto& k : c) {
      s += k.basic(d);
      s2 += k.basic(d) * k.basic(d);
    }
    const double mean = s / 10000.0;
    const double sd = std::sqrt(s2 / 10000.0 - mean * mean);
    EXPECT_NEAR(sd, 0.3, 0.05 * 0.3);
  }
}

TEST(Acquisition, CandidateCountIsCapped) {
  std::vector<Vector> centers(7, Vector::Zero(2));
  Rng rng(2);
  EXPECT_EQ(generate_candidates(centers, 0.3, 100, 350, rng).size(), 7u * 50u);
  EXPECT_EQ(generate_candidates(centers, 0.3, 100, 3, rng).size(), 7u);
}

TEST(Acquisition, ExpectedImprovementClosedForms) {
  EXPECT_NEAR(expected_improvement({0.0, 1.0}, 0.0), 0.39894, 1e-5);
  EXPECT_DOUBLE_EQ(expected_improvement({3.0, 0.0}, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(expected_improvement({-3.0, 0.0}, 1.0), 0.0);
}

TEST(Acquisition, ExpectedImprovementMatchesMonteCarlo) {
  Rng rng(3);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += std::max(standard_normal(rng) - 1.0, 0.0);
  const double mc = sum / n;
  const double ei = expected_improvement({0.0, 1.0}, 1.0);
  EXPECT_NEAR(ei, 0.08332, 1e-4);
  EXPECT_NEAR(ei, mc, 0.01 * mc);
}

TEST(Acquisition, SuccessProbability) {
  EXPECT_DOUBLE_EQ(success_probability({0.0, 2.0}), 0.5);
  EXPECT_NEAR(success_probability({1.0, 1.0}), 0.15866, 1e-5);
  Rng rng(4);
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += (1.0 + standard_normal(rng)) < 0.0;
  EXPECT_NEAR(success_probability({1.0, 1.0}), hits / 100000.0, 0.005);
  EXPECT_DOUBLE_EQ(p_success(std::nullopt, Vector::Zero(2)), 1.0);
}

TEST(Acquisition, CostTransformRoundTrip) {
  const std::vector<double> costs{1.0, 10.0, 100.0};
  const auto t = CostTransform::fit(costs, true);
  EXPECT_NEAR(t.to_model(10.0), 0.0, 1e-12);
  for (double c : costs) EXPECT_NEAR(t.from_model(t.to_model(c)), c, 1e-9 * c);
}

TEST(Acquisition, ParetoModelReproducesFrontMembers) {
  // Near-noiseless front model over model-space cost.
  const std::vector<double> cost{-1.0, -0.3, 0.4, 1.2};
  const std::vector<double> out{-1.0, 0.1, 0.6, 1.4};
  const auto pf = gp_1d(cost, out, 1.0, 1e-6, KernelKind::Rbf);
  for (std::size_t i = 0; i < cost.size(); ++i) {
    const auto p = pf.predict(Vector(Vector::Constant(1, cost[i])));
    EXPECT_LE(std::abs(p.mean - out[i]), 2.0 * std::sqrt(p.variance) + 1e-6);
  }
}

TEST(Acquisition, MonotoneFrontGivesMonotoneModel) {
  Rng rng(5);
  std::vector<double> cost, out;
  for (int i = 0; i < 8; ++i) {
    cost.push_back(-1.5 + 3.0 * i / 7.0);
    out.push_back(std::tanh(cost.back()));
  }
  Matrix x(8, 1);
  Vector y(8);
  for (int i = 0; i < 8; ++i) {
    x(i, 0) = cost[static_cast<std::size_t>(i)];
    y(i) = out[static_cast<std::size_t>(i)];
  }
  const auto pf = GaussianProcess::fit(x, y, {KernelKind::Rbf, true}, rng);
  double prev = -1e300;
  for (double c = -1.5; c <= 1.5; c += 0.01) {
    const double m = pf.predict(Vector(Vector::Constant(1, c))).mean;
    EXPECT_GE(m, prev - 1e-9);
    prev = m;
  }
}

TEST(Acquisition, FlatFrontGivesConstantBaseline) {
  auto models = flat_models();
  models.pareto_constant = 0.7;
  const Vector x = Vector::Constant(1, 0.5);
  EXPECT_DOUBLE_EQ(pareto_baseline(models, x).pareto_value, 0.7);
  models.pareto = gp_1d({-1.0, 0.0, 1.0}, {0.7, 0.7, 0.7}, 1.0, 1e-6, KernelKind::Rbf);
  models.pareto_constant = 0.0;
  EXPECT_NEAR(models.pareto->predict(Vector(Vector::Constant(1, -0.5))).mean,
              models.pareto->predict(Vector(Vector::Constant(1, 0.5))).mean, 1e-3);
}

TEST(Acquisition, SingleMemberThresholdIsItsCost) {
  ParetoSet front;
  front.members = {member(7.0, 1.0)};
  Rng rng(6);
  EXPECT_DOUBLE_EQ(sample_threshold(front, flat_models(), rng).cost, 7.0);
}

TEST(Acquisition, ThresholdIsLogUniform) {
  ParetoSet front;
  front.members = {member(1.0, 0.0), member(10.0, 1.0), member(100.0, 2.0)};
  Rng rng(7);
  std::vector<double> u;
  for (int i = 0; i < 10000; ++i) u.push_back(std::log(sample_threshold(front, flat_models(), rng).cost) / std::log(100.0));
  std::sort(u.begin(), u.end());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double n = double(u.size());
    d = std::max({d, double(i + 1) / n - u[i], u[i] - double(i) / n});
  }
  EXPECT_LT(d, 1.628 / std::sqrt(10000.0));
}

TEST(Acquisition, EiThresholdUsesLargerOfBaselines) {
  auto models = flat_models();
  models.pareto = gp_1d({-1.0, 1.0}, {-2.0, 2.0}, 4.0, 1e-6, KernelKind::Rbf);
  models.cost = gp_1d({-1.0, 1.0}, {-1.0, 1.0});
  models.cost_transform = CostTransform{false, 0.0, 1.0};
  ParetoSet front;
  front.members = {member(1.0, 0.0)};  // c_th = 1 -> threshold value = pf(1) ~ 2
  std::vector<Candidate> c{{Vector::Constant(1, -1.0), 0, 1.0}};  // predicted cost -1 -> pf ~ -2
  Rng rng(9);
  const auto sel = score_and_select(c, models, front, {AcquisitionMode::EiThreshold, kInfinity}, rng);
  EXPECT_LT(sel.best.pareto_value, sel.best.threshold_value);
  const double ei_th = expected_improvement({sel.best.output_mean, sel.best.output_variance}, sel.best.threshold_value);
  EXPECT_DOUBLE_EQ(sel.best.ei, ei_th);
}

TEST(Acquisition, SearchDensityBreaksTies) {
  const auto models = flat_models();
  ParetoSet front;
  front.members = {member(1.0, 0.0)};
  std::vector<Candidate> c{{Vector::Constant(1, 0.5), 0, 1.0}, {Vector::Constant(1, 0.5), 0, 0.5}};
  Rng rng(10);
  const auto sel = score_and_select(c, models, front, {}, rng);
  EXPECT_EQ(sel.best.candidate.search_density, 1.0);
}

TEST(Acquisition, CertainFailureIsNeverSelected) {
  auto models = flat_models();
  models.output = gp_1d({-1.0, 5.0}, {0.0, 3.0});
  models.failure = gp_1d({5.0, -1.0}, {1.0, -1.0}, 1.0, 1e-12);
  ParetoSet front;
  front.members = {member(1.0, 0.0)};
  std::vector<Candidate> c{{Vector::Constant(1, 5.0), 0, 1.0}, {Vector::Constant(1, 0.0), 0, 1.0}};
  Rng rng(11);
  const auto sel = score_and_select(c, models, front, {}, rng);
  EXPECT_DOUBLE_EQ(sel.best.candidate.basic(0), 0.0);
}

TEST(Acquisition, EiMaxWithUnreachableBaseline) {
  auto models = flat_models();
  models.output = gp_1d({-1.0, 0.0, 1.0}, {0.1, 0.2, 0.3}, 0.01, 1e-6);
  models.best_output = 10.0;
  ParetoSet front;
  front.members = {member(1.0, 0.0)};
  std::vector<Candidate> c;
  for (int i = 0; i < 20; ++i) c.push_back({Vector::Constant(1, -1.0 + 0.1 * i), 0, 1.0});
  Rng rng(12);
  const auto sel = score_and_select(c, models, front, {AcquisitionMode::EiMax, kInfinity}, rng);
  EXPECT_LT(sel.best.score, 1e-5);
}

TEST(Acquisition, CostCeilingFallsBackToCheapest) {
  auto models = flat_models();
  models.cost = gp_1d({-1.0, 1.0}, {-1.0, 1.0});
  models.cost_transform = CostTransform{false, 10.0, 1.0};
  ParetoSet front;
  front.members = {member(1.0, 0.0)};
  std::vector<Candidate> c{{Vector::Constant(1, 1.0), 0, 1.0}, {Vector::Constant(1, -1.0), 0, 1.0}};
  Rng rng(13);
  const auto sel = score_and_select(c, models, front, {AcquisitionMode::EiThreshold, 2.0}, rng);
  EXPECT_TRUE(sel.cost_ceiling_fallback);
  EXPECT_EQ(sel.surviving, 0u);
  EXPECT_DOUBLE_EQ(sel.best.candidate.basic(0), -1.0);
}

TEST(Acquisition, ParsesModes) {
  EXPECT_EQ(parse_acquisition_mode("EI-th"), AcquisitionMode::EiThreshold);
  EXPECT_EQ(parse_acquisition_mode("ei_pf"), AcquisitionMode::EiPareto);
  EXPECT_EQ(parse_acquisition_mode("EI-MAX"), AcquisitionMode::EiMax);
  EXPECT_THROW(parse_acquisition_mode("ucb"), std::invalid_argument);
}

}  // namespace
}  // namespace carbs
