# Copyright 2026 The etsddp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the etsddp trajectory optimizer."""

from ._etsddp import (
    ConfigError,
    Ellipsoid,
    SynthesisError,
    car_step,
    chi2_cdf,
    chi2_quantile,
    compare,
    contains,
    generate_dataset,
    mahalanobis,
    offset_jacobian,
    project,
    solve,
    synthesize,
)

__all__ = [
    "ConfigError",
    "Ellipsoid",
    "SynthesisError",
    "car_step",
    "chi2_cdf",
    "chi2_quantile",
    "compare",
    "contains",
    "generate_dataset",
    "mahalanobis",
    "offset_jacobian",
    "project",
    "solve",
    "synthesize",
]
