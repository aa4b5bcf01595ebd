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

#include "carbs/scaling.hpp"

#include <cmath>
#include <limits>

namespace carbs {

ScalingFit fit_scaling(const SearchSpace& space, const ParetoSet& pareto, const ScalingOptions& options) {
  const std::size_t m = pareto.size();
  if (m < 3) throw ScalingError("scaling fit needs at least 3 front members");

  std::vector<double> u(m), w(m);
  double wsum = 0.0, ubar = 0.0;
  ScalingFit fit;
  fit.front_size = m;
  fit.min_cost = kInfinity;
  fit.max_cost = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& g = pareto.members[i];
    u[i] = std::log(g.mean_cost);
    w[i] = options.weight_by_count ? static_cast<double>(g.count()) : 1.0;
    wsum += w[i];
    ubar += w[i] * u[i];
    fit.min_cost = std::min(fit.min_cost, g.mean_cost);
    fit.max_cost = std::max(fit.max_cost, g.mean_cost);
  }
  ubar /= wsum;
  double suu = 0.0;
  for (std::size_t i = 0; i < m; ++i) suu += w[i] * (u[i] - ubar) * (u[i] - ubar);
  if (!(suu > 1e-300)) throw ScalingError("front members share a single cost");

  for (std::size_t p = 0; p < space.dimension(); ++p) {
    const auto idx = static_cast<Eigen::Index>(p);
    double xbar = 0.0;
    for (std::size_t i = 0; i < m; ++i) xbar += w[i] * pareto.members[i].basic(idx);
    xbar /= wsum;
    double sux = 0.0;
    for (std::size_t i = 0; i < m; ++i) sux += w[i] * (u[i] - ubar) * (pareto.members[i].basic(idx) - xbar);
    ParamScaling s;
    s.name = space.spec(p).name;
    s.slope = sux / suu;
    s.intercept = xbar - s.slope * ubar;
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = pareto.members[i].basic(idx) - (s.intercept + s.slope * u[i]);
      ssr += w[i] * r * r;
    }
    s.stderr_slope = m > 2 ? std::sqrt(ssr / static_cast<double>(m - 2) / suu) : 0.0;
    fit.params.push_back(std::move(s));
  }
  return fit;
}

Extrapolation extrapolate(const SearchSpace& space, const ScalingFit& fit, double target_cost) {
  if (!(target_cost > 0.0)) throw ScalingError("target cost must be positive");
  if (fit.params.size() != space.dimension()) throw ScalingError("fit does not match the search space");
  Extrapolation out;
  const double u = std::log(target_cost);
  out.basic.resize(static_cast<Eigen::Index>(fit.params.size()));
  for (std::size_t p = 0; p < fit.params.size(); ++p) {
    out.basic(static_cast<Eigen::Index>(p)) = fit.params[p].intercept + fit.params[p].slope * u;
  }
  out.params = space.from_basic(out.basic);
  out.beyond_range = target_cost > 10.0 * fit.max_cost || target_cost < fit.min_cost / 10.0;
  return out;
}

double power_law_exponent(const ParamSpec& spec, const ParamScaling& scaling) {
  if (spec.space_type != SpaceType::Log) return std::numeric_limits<double>::quiet_NaN();
  return scaling.slope * spec.scale;
}

}  // namespace carbs
