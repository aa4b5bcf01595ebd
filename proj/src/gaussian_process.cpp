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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>

namespace carbs {
namespace {

constexpr double kSqrt5 = 2.23606797749978969641;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kJitterStart = 1e-8;
constexpr double kJitterMax = 1e-4;

// Log-space box for every hyperparameter.
constexpr double kMinVariance = 1e-6;
constexpr double kMaxVariance = 1e2;
constexpr double kMinLengthscale = 1e-2;
constexpr double kMaxLengthscale = 1e2;
constexpr double kMaxNoise = 10.0;

double matern52(double r) { return (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r) * std::exp(-kSqrt5 * r); }

std::size_t lengthscale_count(const KernelSpec& kernel, std::size_t dim) {
  return kernel.ard ? std::max<std::size_t>(dim, 1) : 1;
}

// Packing of log-hyperparameters: [log s_lin]? log s_sig, log l_1..l_k, log noise.
struct Layout {
  bool has_linear;
  std::size_t lengthscales;

  std::size_t size() const { return (has_linear ? 1 : 0) + 1 + lengthscales + 1; }
  std::size_t signal() const { return has_linear ? 1 : 0; }
  std::size_t lengthscale(std::size_t j) const { return signal() + 1 + j; }
  std::size_t noise() const { return signal() + 1 + lengthscales; }
};

Layout layout_for(const KernelSpec& kernel, std::size_t dim) {
  return {kernel.kind == KernelKind::LinearPlusMatern, lengthscale_count(kernel, dim)};
}

Hyperparameters unpack(const Layout& layout, const Vector& theta) {
  Hyperparameters h;
  h.linear_variance = layout.has_linear ? std::exp(theta(0)) : 0.0;
  h.signal_variance = std::exp(theta(static_cast<Eigen::Index>(layout.signal())));
  h.lengthscales.resize(static_cast<Eigen::Index>(layout.lengthscales));
  for (std::size_t j = 0; j < layout.lengthscales; ++j) {
    h.lengthscales(static_cast<Eigen::Index>(j)) =
        std::exp(theta(static_cast<Eigen::Index>(layout.lengthscale(j))));
  }
  h.noise_variance = std::exp(theta(static_cast<Eigen::Index>(layout.noise())));
  return h;
}

Vector pack(const Layout& layout, const Hyperparameters& h) {
  Vector theta(static_cast<Eigen::Index>(layout.size()));
  if (layout.has_linear) theta(0) = std::log(std::max(h.linear_variance, kMinVariance));
  theta(static_cast<Eigen::Index>(layout.signal())) = std::log(h.signal_variance);
  for (std::size_t j = 0; j < layout.lengthscales; ++j) {
    theta(static_cast<Eigen::Index>(layout.lengthscale(j))) =
        std::log(h.lengthscales(static_cast<Eigen::Index>(j)));
  }
  theta(static_cast<Eigen::Index>(layout.noise())) = std::log(h.noise_variance);
  return theta;
}

struct Box {
  Vector lower;
  Vector upper;

  Vector clamp(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

Box make_box(const Layout& layout, double noise_floor, bool sampling) {
  Box b;
  const auto n = static_cast<Eigen::Index>(layout.size());
  b.lower.resize(n);
  b.upper.resize(n);
  // The sampling box is where random restarts are drawn from.
  const double var_lo = sampling ? 0.05 : kMinVariance;
  const double var_hi = sampling ? 5.0 : kMaxVariance;
  const double len_lo = sampling ? 0.1 : kMinLengthscale;
  const double len_hi = sampling ? 10.0 : kMaxLengthscale;
  const double noise_lo = sampling ? std::max(noise_floor, 1e-4) : noise_floor;
  const double noise_hi = sampling ? 0.5 : kMaxNoise;
  if (layout.has_linear) {
    b.lower(0) = std::log(sampling ? 1e-3 : kMinVariance);
    b.upper(0) = std::log(sampling ? 1.0 : kMaxVariance);
  }
  const auto s = static_cast<Eigen::Index>(layout.signal());
  b.lower(s) = std::log(var_lo);
  b.upper(s) = std::log(var_hi);
  for (std::size_t j = 0; j < layout.lengthscales; ++j) {
    const auto k = static_cast<Eigen::Index>(layout.lengthscale(j));
    b.lower(k) = std::log(len_lo);
    b.upper(k) = std::log(len_hi);
  }
  const auto z = static_cast<Eigen::Index>(layout.noise());
  b.lower(z) = std::log(noise_lo);
  b.upper(z) = std::log(std::max(noise_hi, noise_lo));
  return b;
}

// Matrix of scaled squared distances sum_j (a_j - b_j)^2 / l_j^2.
Matrix scaled_sq_dist(const Matrix& a, const Matrix& b, const Vector& lengthscales) {
  const auto d = a.cols();
  Matrix as(a.rows(), d), bs(b.rows(), d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double l = lengthscales.size() == 1 ? lengthscales(0) : lengthscales(j);
    as.col(j) = a.col(j) / l;
    bs.col(j) = b.col(j) / l;
  }
  Matrix r2 = (-2.0 * as * bs.transpose()).eval();
  r2.colwise() += as.rowwise().squaredNorm();
  r2.rowwise() += bs.rowwise().squaredNorm().transpose();
  return r2.cwiseMax(0.0);
}

// Exact per-pair evaluation for symmetric Gram matrices.
Matrix gram(const KernelSpec& kernel, const Hyperparameters& h, const Matrix& x) {
  const auto n = x.rows();
  const auto d = x.cols();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double r2 = 0.0;
      for (Eigen::Index c = 0; c < d; ++c) {
        const double l = h.lengthscales.size() == 1 ? h.lengthscales(0) : h.lengthscales(c);
        const double diff = (x(i, c) - x(j, c)) / l;
        r2 += diff * diff;
      }
      double v;
      if (kernel.kind == KernelKind::Rbf) {
        v = h.signal_variance * std::exp(-0.5 * r2);
      } else {
        v = h.linear_variance * x.row(i).dot(x.row(j)) + h.signal_variance * matern52(std::sqrt(r2));
      }
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Vector prior_diag(const KernelSpec& kernel, const Hyperparameters& h, const Matrix& x) {
  Vector out = Vector::Constant(x.rows(), h.signal_variance);
  if (kernel.kind == KernelKind::LinearPlusMatern) {
    out += h.linear_variance * x.rowwise().squaredNorm();
  }
  return out;
}

// Cholesky of k + jitter * I, escalating jitter from 0 through 1e-8 .. 1e-4.
std::optional<std::pair<Eigen::LLT<Matrix>, double>> factorize(const Matrix& k) {
  double jitter = 0.0;
  while (true) {
    Matrix kj = k;
    if (jitter > 0.0) kj.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(kj);
    if (llt.info() == Eigen::Success) return std::make_pair(std::move(llt), jitter);
    if (jitter >= kJitterMax) return std::nullopt;
    jitter = jitter == 0.0 ? kJitterStart : jitter * 10.0;
  }
}

constexpr Eigen::Index kLeafSize = 48;

// In-place inverse of a lower-triangular matrix by recursive blocking.
void lower_inverse(Eigen::Ref<Matrix> l) {
  const auto n = l.rows();
  if (n <= kLeafSize) {
    Matrix id = Matrix::Identity(n, n);
    l.triangularView<Eigen::Lower>().solveInPlace(id);
    l = id;
    return;
  }
  const auto h = n / 2;
  lower_inverse(l.topLeftCorner(h, h));
  lower_inverse(l.bottomRightCorner(n - h, n - h));
  const Matrix t = l.bottomLeftCorner(n - h, h) * l.topLeftCorner(h, h).triangularView<Eigen::Lower>();
  l.bottomLeftCorner(n - h, h).noalias() = -(l.bottomRightCorner(n - h, n - h).triangularView<Eigen::Lower>() * t);
  l.topRightCorner(h, n - h).setZero();
}

// Lower triangle of li^T li for lower-triangular li.
void lower_gram(const Eigen::Ref<const Matrix>& li, Eigen::Ref<Matrix> out) {
  const auto n = li.rows();
  if (n <= kLeafSize) {
    out.noalias() = li.transpose() * li;
    return;
  }
  const auto h = n / 2;
  auto top = out.topLeftCorner(h, h);
  lower_gram(li.topLeftCorner(h, h), top);
  top.selfadjointView<Eigen::Lower>().rankUpdate(li.bottomLeftCorner(n - h, h).transpose());
  out.bottomLeftCorner(n - h, h).noalias() =
      li.bottomRightCorner(n - h, n - h).transpose().triangularView<Eigen::Upper>() * li.bottomLeftCorner(n - h, h);
  lower_gram(li.bottomRightCorner(n - h, n - h), out.bottomRightCorner(n - h, n - h));
}

// Precomputed pieces of the likelihood that do not depend on hyperparameters.
class Likelihood {
 public:
  Likelihood(const Matrix& x, const Vector& y, const KernelSpec& kernel)
      : x_(x), y_(y), kernel_(kernel), layout_(layout_for(kernel, static_cast<std::size_t>(x.cols()))) {
    if (kernel.kind == KernelKind::LinearPlusMatern) dot_ = x * x.transpose();
  }

  const Layout& layout() const { return layout_; }

  // Negative log marginal likelihood and its gradient in log-space. Only
  // lower triangles are formed; off-diagonal terms count twice.
  bool evaluate(const Vector& theta, double& value, Vector& grad) const {
    const Hyperparameters h = unpack(layout_, theta);
    const auto n = x_.rows();
    const auto d = x_.cols();
    const bool ard = layout_.lengthscales > 1;
    Vector inv_l2(d);
    for (Eigen::Index c = 0; c < d; ++c) {
      const double l = ard ? h.lengthscales(c) : h.lengthscales(0);
      inv_l2(c) = 1.0 / (l * l);
    }
    const bool matern = kernel_.kind == KernelKind::LinearPlusMatern;

    Matrix k(n, n), base(n, n), dbase(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index m = n - j;
      Eigen::ArrayXd r2 = Eigen::ArrayXd::Zero(m);
      for (Eigen::Index c = 0; c < d; ++c) r2 += inv_l2(c) * (x_.col(c).segment(j, m).array() - x_(j, c)).square();
      if (matern) {
        // d k / d log l_c = s (5/3) (1 + sqrt5 r) exp(-sqrt5 r) diff_c^2 / l_c^2
        const Eigen::ArrayXd r = r2.sqrt();
        const Eigen::ArrayXd e = (-kSqrt5 * r).exp();
        base.col(j).segment(j, m) = (1.0 + kSqrt5 * r + 5.0 / 3.0 * r2) * e;
        dbase.col(j).segment(j, m) = 5.0 / 3.0 * (1.0 + kSqrt5 * r) * e;
        k.col(j).segment(j, m) = h.signal_variance * base.col(j).segment(j, m) + h.linear_variance * dot_.col(j).segment(j, m);
      } else {
        // d k / d log l_c = k diff_c^2 / l_c^2
        base.col(j).segment(j, m) = (-0.5 * r2).exp();
        dbase.col(j).segment(j, m) = base.col(j).segment(j, m);
        k.col(j).segment(j, m) = h.signal_variance * base.col(j).segment(j, m);
      }
    }
    k.diagonal().array() += h.noise_variance;

    auto fac = factorize(k.selfadjointView<Eigen::Lower>());
    if (!fac) return false;
    const auto& llt = fac->first;
    const Vector alpha = llt.solve(y_);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    value = 0.5 * y_.dot(alpha) + 0.5 * log_det +
            0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    if (!std::isfinite(value)) return false;

    Matrix linv = llt.matrixL();
    lower_inverse(linv);
    Matrix inv(n, n);
    lower_gram(linv, inv);

    // d(-lml)/d theta_k = -0.5 tr((alpha alpha^T - K^-1) dK/dtheta_k)
    double g_lin = 0.0, g_sig = 0.0, g_noise = 0.0;
    Vector g_len = Vector::Zero(static_cast<Eigen::Index>(layout_.lengthscales));
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index m = n - j;
      Eigen::ArrayXd wa = 2.0 * (alpha.segment(j, m) * alpha(j) - inv.col(j).segment(j, m)).array();
      wa(0) *= 0.5;
      g_noise += wa(0);
      if (matern) g_lin += (wa * dot_.col(j).segment(j, m).array()).sum();
      g_sig += (wa * base.col(j).segment(j, m).array()).sum();
      const Eigen::ArrayXd wd = wa * dbase.col(j).segment(j, m).array();
      for (Eigen::Index c = 0; c < d; ++c) {
        g_len(ard ? c : 0) += inv_l2(c) * (wd * (x_.col(c).segment(j, m).array() - x_(j, c)).square()).sum();
      }
    }
    grad.resize(static_cast<Eigen::Index>(layout_.size()));
    if (layout_.has_linear) grad(0) = -0.5 * h.linear_variance * g_lin;
    grad(static_cast<Eigen::Index>(layout_.signal())) = -0.5 * h.signal_variance * g_sig;
    for (std::size_t g = 0; g < layout_.lengthscales; ++g) {
      grad(static_cast<Eigen::Index>(layout_.lengthscale(g))) =
          -0.5 * h.signal_variance * g_len(static_cast<Eigen::Index>(g));
    }
    grad(static_cast<Eigen::Index>(layout_.noise())) = -0.5 * h.noise_variance * g_noise;
    return grad.allFinite();
  }

 private:
  const Matrix& x_;
  const Vector& y_;
  KernelSpec kernel_;
  Layout layout_;
  Matrix dot_;
};

struct LocalResult {
  Vector theta;
  double value = std::numeric_limits<double>::infinity();
};

// Projected L-BFGS with Armijo backtracking inside a box.
LocalResult minimize(const Likelihood& objective, const Box& box, Vector x, const FitOptions& opt) {
  constexpr std::size_t kMemory = 6;
  constexpr double kMaxStep = 2.0;
  x = box.clamp(x);
  LocalResult best;
  double f;
  Vector g;
  if (!objective.evaluate(x, f, g)) return best;
  best = {x, f};

  std::deque<std::pair<Vector, Vector>> memory;
  const auto free_mask = [&](const Vector& pt, const Vector& grad) {
    Vector mask = Vector::Ones(pt.size());
    for (Eigen::Index i = 0; i < pt.size(); ++i) {
      if ((pt(i) <= box.lower(i) && grad(i) > 0.0) || (pt(i) >= box.upper(i) && grad(i) < 0.0)) {
        mask(i) = 0.0;
      }
    }
    return mask;
  };

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const Vector mask = free_mask(x, g);
    const Vector pg = g.cwiseProduct(mask);
    if (pg.lpNorm<Eigen::Infinity>() < 1e-9) break;

    Vector q = pg;
    std::vector<double> rho(memory.size()), alpha(memory.size());
    for (std::size_t i = memory.size(); i-- > 0;) {
      rho[i] = 1.0 / memory[i].second.dot(memory[i].first);
      alpha[i] = rho[i] * memory[i].first.dot(q);
      q -= alpha[i] * memory[i].second;
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      q *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t i = 0; i < memory.size(); ++i) {
      const double beta = rho[i] * memory[i].second.dot(q);
      q += (alpha[i] - beta) * memory[i].first;
    }
    Vector dir = (-q).cwiseProduct(mask);
    if (dir.dot(pg) >= 0.0) {
      memory.clear();
      dir = -pg;
    }
    const double inf_norm = dir.lpNorm<Eigen::Infinity>();
    if (inf_norm > kMaxStep) dir *= kMaxStep / inf_norm;

    double step = 1.0;
    bool accepted = false;
    Vector x_new, g_new;
    double f_new = 0.0;
    for (int tries = 0; tries < 30; ++tries) {
      x_new = box.clamp(x + step * dir);
      if (objective.evaluate(x_new, f_new, g_new) && f_new <= f + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (memory.empty()) break;
      memory.clear();
      continue;
    }
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    if (s.dot(y) > 1e-12) {
      memory.emplace_back(s, y);
      if (memory.size() > kMemory) memory.pop_front();
    }
    const double change = f - f_new;
    x = x_new;
    f = f_new;
    g = g_new;
    if (f < best.value) best = {x, f};
    if (std::abs(change) <= opt.tolerance * (1.0 + std::abs(f))) break;
  }
  return best;
}

}  // namespace

Matrix kernel_matrix(const KernelSpec& kernel, const Hyperparameters& hyper, const Matrix& a,
                     const Matrix& b) {
  const Matrix r2 = scaled_sq_dist(a, b, hyper.lengthscales);
  if (kernel.kind == KernelKind::Rbf) {
    return hyper.signal_variance * (-0.5 * r2.array()).exp().matrix();
  }
  const Eigen::ArrayXXd r = r2.array().sqrt();
  Matrix k = hyper.signal_variance *
             ((1.0 + kSqrt5 * r + 5.0 / 3.0 * r2.array()) * (-kSqrt5 * r).exp()).matrix();
  k.noalias() += hyper.linear_variance * a * b.transpose();
  return k;
}

GaussianProcess GaussianProcess::with_hyperparameters(const Matrix& inputs, const Vector& targets,
                                                      const KernelSpec& kernel,
                                                      const Hyperparameters& hyper) {
  if (inputs.rows() != targets.size() || inputs.rows() == 0) {
    throw FitError("GP needs matching, non-empty inputs and targets");
  }
  if (!inputs.allFinite() || !targets.allFinite()) throw FitError("GP data must be finite");
  GaussianProcess gp;
  gp.kernel_ = kernel;
  gp.hyper_ = hyper;
  if (gp.hyper_.lengthscales.size() == 0) {
    gp.hyper_.lengthscales = Vector::Ones(static_cast<Eigen::Index>(
        lengthscale_count(kernel, static_cast<std::size_t>(inputs.cols()))));
  }
  gp.inputs_ = inputs;
  gp.targets_ = targets;
  Matrix k = gram(kernel, gp.hyper_, inputs);
  k.diagonal().array() += gp.hyper_.noise_variance;
  auto fac = factorize(k);
  if (!fac) throw FitError("Gram matrix is not positive definite after jitter escalation");
  gp.factor_ = std::move(fac->first);
  gp.jitter_ = fac->second;
  gp.alpha_ = gp.factor_.solve(targets);
  const Matrix lmat = gp.factor_.matrixL();
  gp.log_likelihood_ = -0.5 * targets.dot(gp.alpha_) - lmat.diagonal().array().log().sum() -
                       0.5 * static_cast<double>(targets.size()) * std::log(2.0 * std::numbers::pi);
  return gp;
}

double GaussianProcess::log_marginal_likelihood(const Matrix& inputs, const Vector& targets,
                                                const KernelSpec& kernel,
                                                const Hyperparameters& hyper) {
  try {
    return with_hyperparameters(inputs, targets, kernel, hyper).log_marginal_likelihood();
  } catch (const FitError&) {
    return kNegInf;
  }
}

GaussianProcess GaussianProcess::fit(const Matrix& inputs, const Vector& targets,
                                     const KernelSpec& kernel, Rng& rng, const FitOptions& options) {
  if (inputs.rows() != targets.size() || inputs.rows() == 0) {
    throw FitError("GP needs matching, non-empty inputs and targets");
  }
  if (!inputs.allFinite() || !targets.allFinite()) throw FitError("GP data must be finite");

  const Likelihood objective(inputs, targets, kernel);
  const Layout& layout = objective.layout();
  const Box box = make_box(layout, options.noise_floor, false);
  const Box sampling = make_box(layout, options.noise_floor, true);

  Hyperparameters start;
  start.linear_variance = layout.has_linear ? 0.1 : 0.0;
  start.signal_variance = 1.0;
  start.lengthscales = Vector::Ones(static_cast<Eigen::Index>(layout.lengthscales));
  start.noise_variance = std::max(0.01, options.noise_floor);

  std::vector<Vector> starts{pack(layout, start)};
  for (int r = 0; r < options.restarts; ++r) {
    Vector theta(static_cast<Eigen::Index>(layout.size()));
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      theta(i) = uniform(rng, sampling.lower(i), sampling.upper(i));
    }
    starts.push_back(std::move(theta));
  }

  LocalResult best;
  for (const auto& s : starts) {
    LocalResult r = minimize(objective, box, s, options);
    if (r.theta.size() > 0 && r.value < best.value) best = std::move(r);
  }
  if (best.theta.size() == 0) throw FitError("marginal likelihood could not be evaluated");
  return with_hyperparameters(inputs, targets, kernel, unpack(layout, best.theta));
}

Posterior GaussianProcess::predict(const Vector& query) const {
  const PosteriorBatch batch = predict(Matrix(query.transpose()));
  return {batch.mean(0), batch.variance(0)};
}

PosteriorBatch GaussianProcess::predict(const Matrix& queries) const {
  const Matrix cross = kernel_matrix(kernel_, hyper_, queries, inputs_);  // m x n
  PosteriorBatch out;
  out.mean = cross * alpha_;
  const Matrix v = factor_.matrixL().solve(cross.transpose());  // n x m
  out.variance = (prior_diag(kernel_, hyper_, queries) - v.colwise().squaredNorm().transpose())
                     .cwiseMax(0.0);
  return out;
}

Vector GaussianProcess::thompson_sample(const Matrix& queries, Rng& rng) const {
  const Matrix cross = kernel_matrix(kernel_, hyper_, queries, inputs_);
  const Vector mean = cross * alpha_;
  const Matrix v = factor_.matrixL().solve(cross.transpose());
  Matrix cov = gram(kernel_, hyper_, queries) - v.transpose() * v;
  cov = 0.5 * (cov + cov.transpose()).eval();
  double jitter = 1e-10;
  Eigen::LLT<Matrix> llt;
  while (true) {
    Matrix cj = cov;
    cj.diagonal().array() += jitter;
    llt.compute(cj);
    if (llt.info() == Eigen::Success) break;
    if (jitter > 1.0) throw FitError("posterior covariance is not positive definite");
    jitter *= 10.0;
  }
  Vector z(queries.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = standard_normal(rng);
  return mean + llt.matrixL() * z;
}

GaussianProcess GaussianProcess::condition_on(const Matrix& extra_inputs,
                                              const Vector& extra_targets) const {
  if (extra_inputs.rows() == 0) return *this;
  Matrix x(inputs_.rows() + extra_inputs.rows(), inputs_.cols());
  x << inputs_, extra_inputs;
  Vector y(targets_.size() + extra_targets.size());
  y << targets_, extra_targets;
  return with_hyperparameters(x, y, kernel_, hyper_);
}

}  // namespace carbs
