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

#include "carbs/gaussian_process.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace carbs {
namespace {

Matrix random_inputs(Rng& rng, Eigen::Index n, Eigen::Index d) {
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = uniform(rng, -2.0, 2.0);
  }
  return x;
}

Hyperparameters random_hyper(Rng& rng, Eigen::Index d) {
  Hyperparameters h;
  h.linear_variance = std::exp(uniform(rng, -4.0, 0.0));
  h.signal_variance = std::exp(uniform(rng, -1.0, 1.0));
  h.lengthscales = Vector(d);
  for (Eigen::Index j = 0; j < d; ++j) h.lengthscales(j) = std::exp(uniform(rng, -1.0, 1.5));
  h.noise_variance = std::exp(uniform(rng, -8.0, -2.0));
  return h;
}

TEST(GaussianProcess, MatchesDenseOracle) {
  Rng rng(42);
  for (const auto kind : {KernelKind::LinearPlusMatern, KernelKind::Rbf}) {
    for (int t = 0; t < 10; ++t) {
      const Eigen::Index d = 1 + t % 4, n = 5 + 3 * t;
      const Matrix x = random_inputs(rng, n, d);
      Vector y(n);
      for (Eigen::Index i = 0; i < n; ++i) y(i) = std::sin(x.row(i).sum()) + 0.1 * standard_normal(rng);
      const KernelSpec spec{kind, true};
      Hyperparameters h = random_hyper(rng, d);
      if (kind == KernelKind::Rbf) h.linear_variance = 0.0;
      const auto gp = GaussianProcess::with_hyperparameters(x, y, spec, h);
      const oracle::DenseGp ref(x, y, spec, h, gp.jitter());
      const Matrix q = random_inputs(rng, 7, d);
      const auto batch = gp.predict(q);
      for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const auto [m, v] = ref.predict(q.row(i).transpose());
        EXPECT_NEAR(batch.mean(i), m, 1e-6);
        EXPECT_NEAR(batch.variance(i), std::max(v, 0.0), 1e-6);
      }
    }
  }
}

TEST(GaussianProcess, IdenticalInputsDisagreeingTargetsGetNoise) {
  Matrix x(2, 1);
  x << 0.3, 0.3;
  Vector y(2);
  y << -1.0, 1.0;
  Rng rng(1);
  const auto gp = GaussianProcess::fit(x, y, {}, rng);
  EXPECT_GT(gp.hyperparameters().noise_variance, 1e-3);
}

TEST(GaussianProcess, InterpolatesNoiselessLinearData) {
  Rng rng(7);
  const Matrix x = random_inputs(rng, 20, 3);
  const Vector w = (Vector(3) << 0.5, -1.0, 0.25).finished();
  const Vector y = x * w;
  const auto gp = GaussianProcess::fit(x, y, {}, rng);
  const auto post = gp.predict(x);
  for (Eigen::Index i = 0; i < x.rows(); ++i) EXPECT_NEAR(post.mean(i), y(i), 1e-4);
}

TEST(GaussianProcess, FittedLikelihoodBeatsRandomDraws) {
  Rng rng(9);
  for (const auto kind : {KernelKind::LinearPlusMatern, KernelKind::Rbf}) {
    const Matrix x = random_inputs(rng, 25, 2);
    Vector y(25);
    for (Eigen::Index i = 0; i < 25; ++i) y(i) = std::cos(1.5 * x(i, 0)) * x(i, 1) + 0.05 * standard_normal(rng);
    const KernelSpec spec{kind, true};
    const auto gp = GaussianProcess::fit(x, y, spec, rng);
    for (int k = 0; k < 20; ++k) {
      Hyperparameters h = random_hyper(rng, 2);
      if (kind == KernelKind::Rbf) h.linear_variance = 0.0;
      EXPECT_GE(gp.log_marginal_likelihood(), GaussianProcess::log_marginal_likelihood(x, y, spec, h) - 1e-9);
    }
  }
}

TEST(GaussianProcess, TrainingPointOfNearNoiselessModel) {
  Rng rng(3);
  const Matrix x = random_inputs(rng, 10, 2);
  Vector y(10);
  for (Eigen::Index i = 0; i < 10; ++i) y(i) = x(i, 0) - x(i, 1) * x(i, 1);
  Hyperparameters h;
  h.linear_variance = 0.1;
  h.signal_variance = 1.0;
  h.lengthscales = Vector::Ones(2);
  h.noise_variance = 1e-6;
  const auto gp = GaussianProcess::with_hyperparameters(x, y, {}, h);
  const auto p = gp.predict(Vector(x.row(4).transpose()));
  EXPECT_NEAR(p.mean, y(4), 1e-3);
  EXPECT_LT(p.variance, h.noise_variance + 1e-3);
}

TEST(GaussianProcess, FarQueryRevertsToPriorPlusLinearTrend) {
  Rng rng(4);
  const Matrix x = random_inputs(rng, 12, 1);
  Vector y = 2.0 * x.col(0);
  Hyperparameters h;
  h.linear_variance = 1.0;
  h.signal_variance = 0.5;
  h.lengthscales = Vector::Constant(1, 0.5);
  h.noise_variance = 1e-4;
  const auto gp = GaussianProcess::with_hyperparameters(x, y, {}, h);
  const oracle::DenseGp ref(x, y, {}, h, gp.jitter());
  Vector q = Vector::Constant(1, 30.0);
  const auto p = gp.predict(q);
  const auto [m, v] = ref.predict(q);
  EXPECT_NEAR(p.mean, m, 1e-6);
  EXPECT_NEAR(p.variance, v, 1e-6);
  // Far out only the linear part remains, so the mean is proportional to x.
  const auto p2 = gp.predict(Vector(Vector::Constant(1, 60.0)));
  EXPECT_NEAR(p2.mean / p.mean, 2.0, 1e-9);
  EXPECT_GT(p.mean, 30.0);
  EXPECT_GT(p.variance, 0.5 * 0.99);
}

TEST(GaussianProcess, SinglePointAtOrigin) {
  Matrix x = Matrix::Zero(1, 1);
  Vector y = Vector::Zero(1);
  Rng rng(5);
  const auto gp = GaussianProcess::fit(x, y, {}, rng);
  const auto p = gp.predict(Vector(Vector::Zero(1)));
  EXPECT_NEAR(p.mean, 0.0, 1e-12);
  EXPECT_LT(p.variance, 1e-5);
}

TEST(GaussianProcess, ThompsonDrawsMatchPosteriorMean) {
  Rng rng(6);
  const Matrix x = random_inputs(rng, 8, 2);
  Vector y(8);
  for (Eigen::Index i = 0; i < 8; ++i) y(i) = x(i, 0) * x(i, 1);
  const auto gp = GaussianProcess::fit(x, y, {}, rng);
  Matrix q(1, 2);
  q << 0.7, -1.3;
  const auto post = gp.predict(Vector(q.row(0).transpose()));
  double sum = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) sum += gp.thompson_sample(q, rng)(0);
  const double se = std::sqrt(post.variance / draws);
  EXPECT_NEAR(sum / draws, post.mean, 3.0 * se + 1e-9);
}

TEST(GaussianProcess, CoincidentQueriesDrawEqualValues) {
  Rng rng(8);
  const Matrix x = random_inputs(rng, 6, 1);
  const Vector y = x.col(0).array().square();
  const auto gp = GaussianProcess::fit(x, y, {}, rng);
  Matrix q(2, 1);
  q << 0.4, 0.4;
  const Vector s = gp.thompson_sample(q, rng);
  EXPECT_NEAR(s(0), s(1), 1e-3);
}

TEST(GaussianProcess, ThompsonIsDeterministicPerSeed) {
  Rng rng(10);
  const Matrix x = random_inputs(rng, 6, 2);
  const Vector y = x.col(0);
  const auto gp = GaussianProcess::fit(x, y, {}, rng);
  const Matrix q = random_inputs(rng, 4, 2);
  Rng a(123), b(123);
  EXPECT_EQ(gp.thompson_sample(q, a), gp.thompson_sample(q, b));
}

TEST(GaussianProcess, ConditionOnEmptyIsIdentity) {
  Rng rng(11);
  const Matrix x = random_inputs(rng, 6, 2);
  const Vector y = x.col(1);
  const auto gp = GaussianProcess::fit(x, y, {}, rng);
  const auto same = gp.condition_on(Matrix(0, 2), Vector(0));
  const Matrix q = random_inputs(rng, 5, 2);
  EXPECT_EQ(gp.predict(q).mean, same.predict(q).mean);
  EXPECT_EQ(gp.predict(q).variance, same.predict(q).variance);
}

TEST(GaussianProcess, ConditionOnOwnMeanShrinksVariance) {
  Rng rng(12);
  const Matrix x = random_inputs(rng, 6, 2);
  const Vector y = x.col(0) - x.col(1);
  const auto gp = GaussianProcess::fit(x, y, {}, rng);
  const Vector q = (Vector(2) << 1.7, 1.9).finished();
  const auto before = gp.predict(q);
  const auto after = gp.condition_on(Matrix(q.transpose()), Vector::Constant(1, before.mean)).predict(q);
  EXPECT_NEAR(after.mean, before.mean, 1e-6);
  EXPECT_LT(after.variance, before.variance);
}

TEST(GaussianProcess, ConditionOnEqualsRefitAtFixedHyperparameters) {
  Rng rng(13);
  for (int t = 0; t < 5; ++t) {
    const Matrix x = random_inputs(rng, 5, 2);
    const Vector y = (x.col(0).array().sin() + x.col(1).array()).matrix();
    const auto gp = GaussianProcess::fit(x.topRows(3), y.head(3), {}, rng);
    const auto cond = gp.condition_on(x.bottomRows(2), y.tail(2));
    const oracle::DenseGp ref(x, y, {}, gp.hyperparameters(), cond.jitter());
    const Matrix q = random_inputs(rng, 6, 2);
    const auto p = cond.predict(q);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      const auto [m, v] = ref.predict(q.row(i).transpose());
      EXPECT_NEAR(p.mean(i), m, 1e-6);
      EXPECT_NEAR(p.variance(i), std::max(v, 0.0), 1e-6);
    }
  }
}

TEST(GaussianProcess, RejectsBadData) {
  Rng rng(14);
  EXPECT_THROW(GaussianProcess::fit(Matrix(0, 1), Vector(0), {}, rng), FitError);
  Matrix x(1, 1);
  x << std::nan("");
  EXPECT_THROW(GaussianProcess::fit(x, Vector::Zero(1), {}, rng), FitError);
}

}  // namespace
}  // namespace carbs
