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

#include "carbs/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace carbs {

std::vector<std::size_t> pareto_indices(std::span<const OutputCost> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].cost != points[b].cost) return points[a].cost < points[b].cost;
    if (points[a].output != points[b].output) return points[a].output > points[b].output;
    return a < b;
  });

  std::vector<std::size_t> front;
  double best_cheaper = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t end = i + 1;
    while (end < order.size() && points[order[end]].cost == points[order[i]].cost) ++end;
    // Within an equal-cost block only a strict maximum can survive.
    const double top = points[order[i]].output;
    const bool unique_top = end == i + 1 || points[order[i + 1]].output < top;
    if (unique_top && top > best_cheaper) front.push_back(order[i]);
    best_cheaper = std::max(best_cheaper, top);
    i = end;
  }
  return front;
}

std::vector<std::size_t> raw_pareto(std::span<const Observation> observations) {
  std::vector<OutputCost> points;
  std::vector<std::size_t> source;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    if (observations[i].is_failure) continue;
    points.push_back({observations[i].output, observations[i].cost});
    source.push_back(i);
  }
  if (points.empty()) throw std::invalid_argument("raw_pareto needs a successful observation");
  std::vector<std::size_t> front = pareto_indices(points);
  for (auto& idx : front) idx = source[idx];
  return front;
}

std::vector<ObservationGroup> group_observations(std::span<const Observation> observations) {
  std::vector<ObservationGroup> groups;
  std::map<ParamMap, std::size_t> lookup;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& obs = observations[i];
    if (obs.is_failure) continue;
    auto [it, inserted] = lookup.try_emplace(obs.params, groups.size());
    if (inserted) {
      ObservationGroup g;
      g.key = obs.params;
      g.basic = obs.basic;
      g.max_output = obs.output;
      groups.push_back(std::move(g));
    }
    auto& g = groups[it->second];
    g.members.push_back(i);
    g.max_output = std::max(g.max_output, obs.output);
  }
  for (auto& g : groups) {
    double y = 0.0, c = 0.0;
    for (std::size_t idx : g.members) {
      y += observations[idx].output;
      c += observations[idx].cost;
    }
    const auto n = static_cast<double>(g.members.size());
    g.mean_output = y / n;
    g.mean_cost = c / n;
  }
  return groups;
}

ParetoSet grouped_pareto(std::span<const ObservationGroup> groups) {
  std::vector<OutputCost> points;
  points.reserve(groups.size());
  for (const auto& g : groups) points.push_back({g.effective_output(), g.mean_cost});
  ParetoSet set;
  for (std::size_t idx : pareto_indices(points)) set.members.push_back(groups[idx]);
  return set;
}

std::size_t min_cost_floor_index(std::span<const ObservationGroup> groups) {
  if (groups.empty()) throw std::invalid_argument("min-cost floor needs at least one group");
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return groups[a].mean_cost < groups[b].mean_cost;
  });
  const auto cheapest = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(groups.size()))));
  // Groups tied with the last of the cheapest share its rank.
  const double cutoff = groups[order[cheapest - 1]].mean_cost;
  std::size_t best = order[0];
  for (std::size_t k = 1; k < order.size() && groups[order[k]].mean_cost <= cutoff; ++k) {
    if (groups[order[k]].effective_output() > groups[best].effective_output()) best = order[k];
  }
  return best;
}

ParetoSet apply_min_cost_floor(std::span<const ObservationGroup> groups, const ParetoSet& pareto) {
  const ObservationGroup& floor = groups[min_cost_floor_index(groups)];
  ParetoSet out;
  out.members.push_back(floor);
  for (const auto& m : pareto.members) {
    if (m.mean_cost > floor.mean_cost && m.effective_output() > floor.effective_output()) {
      out.members.push_back(m);
    }
  }
  return out;
}

}  // namespace carbs
