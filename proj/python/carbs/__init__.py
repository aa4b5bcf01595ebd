# Copyright 2026 The CARBS Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# 
#     https://www.apache.org/licenses/LICENSE-2.0
# 
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Cost-aware Bayesian hyperparameter optimizer."""

from ._core import (
    ObserveError,
    Optimizer,
    ParamSpec,
    QuantileWarp,
    SearchSpace,
    SnapshotError,
    SpaceError,
    SpaceType,
    __version__,
    expected_improvement,
    normal_quantile,
    pareto_indices,
    run_benchmark,
    success_probability,
)

__all__ = [
    "ObserveError",
    "Optimizer",
    "ParamSpec",
    "QuantileWarp",
    "SearchSpace",
    "SnapshotError",
    "SpaceError",
    "SpaceType",
    "__version__",
    "expected_improvement",
    "normal_quantile",
    "pareto_indices",
    "run_benchmark",
    "success_probability",
]
