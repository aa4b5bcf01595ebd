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

#include <span>
#include <vector>

namespace carbs {

/// Parameter-free monotone map of raw outputs onto standard-normal scores.
///
/// The reference quantiles are taken at ceil(sqrt(t)) equally spaced levels
/// of the t training outputs. A value is mapped to its interpolated quantile
/// level q, clipped to [1e-7, 1 - 1e-7], and then to the normal score of q.
class QuantileWarp {
 public:
  static constexpr double kLevelClip = 1e-7;

  /// Throws std::invalid_argument on empty or non-finite input. Fewer than
  /// two distinct values yields a degenerate warp mapping everything to 0.
  static QuantileWarp fit(std::span<const double> outputs);

  double warp(double value) const;
  std::vector<double> warp(std::span<const double> values) const;
  /// Inverse of warp over the training range.
  double unwarp(double score) const;

  bool degenerate() const { return degenerate_; }
  std::size_t bin_count() const { return quantiles_.size(); }
  const std::vector<double>& quantiles() const { return quantiles_; }
  const std::vector<double>& levels() const { return levels_; }

 private:
  std::vector<double> quantiles_;
  std::vector<double> levels_;
  bool degenerate_ = false;
};

}  // namespace carbs
