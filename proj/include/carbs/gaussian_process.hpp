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

#include "carbs/param_space.hpp"
#include "carbs/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <stdexcept>

namespace carbs {

enum class KernelKind {
  /// k(x, x') = s_lin * <x, x'> + Matern-5/2 with ARD lengthscales.
  LinearPlusMatern,
  /// Squared exponential, used for the one-dimensional Pareto-front model.
  Rbf,
};

struct KernelSpec {
  KernelKind kind = KernelKind::LinearPlusMatern;
  bool ard = true;
};

struct Hyperparameters {
  double linear_variance = 0.0;
  /// Matern variance for LinearPlusMatern, RBF variance for Rbf.
  double signal_variance = 1.0;
  Vector lengthscales;
  double noise_variance = 1e-2;
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

struct PosteriorBatch {
  Vector mean;
  Vector variance;
};

struct FitOptions {
  int restarts = 4;
  int max_iterations = 100;
  double tolerance = 1e-5;
  double noise_floor = 1e-6;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cross-covariance between the rows of a and the rows of b.
Matrix kernel_matrix(const KernelSpec& kernel, const Hyperparameters& hyper, const Matrix& a,
                     const Matrix& b);

/// Zero-mean GP regression model. Immutable once constructed; inputs are the
/// rows of an n x d matrix.
class GaussianProcess {
 public:
  /// Maximises the log marginal likelihood over log-scale hyperparameters by
  /// projected L-BFGS from a default start plus `restarts` random starts.
  static GaussianProcess fit(const Matrix& inputs, const Vector& targets, const KernelSpec& kernel,
                             Rng& rng, const FitOptions& options = {});

  /// Factorises at fixed hyperparameters. Throws FitError if the Gram matrix
  /// is not positive definite even after jitter up to 1e-4.
  static GaussianProcess with_hyperparameters(const Matrix& inputs, const Vector& targets,
                                              const KernelSpec& kernel, const Hyperparameters& hyper);

  /// Log marginal likelihood, or -inf when the Gram matrix cannot be factorised.
  static double log_marginal_likelihood(const Matrix& inputs, const Vector& targets,
                                        const KernelSpec& kernel, const Hyperparameters& hyper);

  Posterior predict(const Vector& query) const;
  PosteriorBatch predict(const Matrix& queries) const;

  /// One joint draw of the latent function at the query rows.
  Vector thompson_sample(const Matrix& queries, Rng& rng) const;

  /// Same hyperparameters, training set extended by the extra rows.
  GaussianProcess condition_on(const Matrix& extra_inputs, const Vector& extra_targets) const;

  double log_marginal_likelihood() const { return log_likelihood_; }
  const Hyperparameters& hyperparameters() const { return hyper_; }
  const KernelSpec& kernel() const { return kernel_; }
  const Matrix& inputs() const { return inputs_; }
  const Vector& targets() const { return targets_; }
  double jitter() const { return jitter_; }
  std::size_t size() const { return static_cast<std::size_t>(targets_.size()); }
  std::size_t input_dimension() const { return static_cast<std::size_t>(inputs_.cols()); }

 private:
  GaussianProcess() = default;

  KernelSpec kernel_;
  Hyperparameters hyper_;
  Matrix inputs_;
  Vector targets_;
  Eigen::LLT<Matrix> factor_;
  Vector alpha_;
  double jitter_ = 0.0;
  double log_likelihood_ = 0.0;
};

}  // namespace carbs
