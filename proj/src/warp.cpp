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

#include "carbs/warp.hpp"

#include "carbs/normal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carbs {
namespace {

// Piecewise-linear interpolation over a non-decreasing abscissa. Inside a
// run of repeated abscissae the value at the end of the run is returned.
double interp(double x, const std::vector<double>& xp, const std::vector<double>& fp) {
  if (x <= xp.front()) return fp.front();
  if (x >= xp.back()) return fp.back();
  const auto it = std::upper_bound(xp.begin(), xp.end(), x);
  const auto j = static_cast<std::size_t>(it - xp.begin()) - 1;
  const double dx = xp[j + 1] - xp[j];
  if (dx <= 0.0) return fp[j];
  return fp[j] + (fp[j + 1] - fp[j]) * (x - xp[j]) / dx;
}

}  // namespace

QuantileWarp QuantileWarp::fit(std::span<const double> outputs) {
  if (outputs.empty()) throw std::invalid_argument("quantile warp needs at least one value");
  std::vector<double> sorted(outputs.begin(), outputs.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw std::invalid_argument("quantile warp input must be finite");
  }
  std::sort(sorted.begin(), sorted.end());

  QuantileWarp w;
  if (sorted.front() == sorted.back()) {
    w.degenerate_ = true;
    w.quantiles_ = {sorted.front()};
    w.levels_ = {0.5};
    return w;
  }

  const std::size_t t = sorted.size();
  const auto bins = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(t)))));
  w.quantiles_.resize(bins);
  w.levels_.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double level = static_cast<double>(k) / static_cast<double>(bins - 1);
    const double h = static_cast<double>(t - 1) * level;
    const auto lo = std::min(static_cast<std::size_t>(std::floor(h)), t - 1);
    const auto hi = std::min(lo + 1, t - 1);
    w.levels_[k] = level;
    w.quantiles_[k] = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  }
  w.quantiles_.front() = sorted.front();
  w.quantiles_.back() = sorted.back();
  return w;
}

double QuantileWarp::warp(double value) const {
  if (degenerate_) return 0.0;
  double level;
  if (value <= quantiles_.front()) {
    level = 0.0;
  } else if (value >= quantiles_.back()) {
    level = 1.0;
  } else {
    // Averaging the forward and mirrored interpolations puts a value that
    // equals a repeated quantile at the middle of its run of levels.
    std::vector<double> neg_q(quantiles_.rbegin(), quantiles_.rend());
    std::vector<double> neg_l(levels_.rbegin(), levels_.rend());
    for (auto& q : neg_q) q = -q;
    for (auto& l : neg_l) l = -l;
    level = 0.5 * (interp(value, quantiles_, levels_) - interp(-value, neg_q, neg_l));
  }
  level = std::clamp(level, kLevelClip, 1.0 - kLevelClip);
  return normal_quantile(level);
}

std::vector<double> QuantileWarp::warp(std::span<const double> values) const {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(warp(v));
  return out;
}

double QuantileWarp::unwarp(double score) const {
  if (degenerate_) return quantiles_.front();
  const double level = normal_cdf(score);
  const double edge = kLevelClip * (1.0 + 1e-6);
  if (level <= edge) return quantiles_.front();
  if (level >= 1.0 - edge) return quantiles_.back();
  const double h = level * static_cast<double>(levels_.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(std::floor(h)), levels_.size() - 2);
  return quantiles_[k] + (h - static_cast<double>(k)) * (quantiles_[k + 1] - quantiles_[k]);
}

}  // namespace carbs
