# SPDX-License-Identifier: Apache-2.0
#
# cfisac - Doppler-aware sensing simulator for cell-free ISAC networks
# Copyright (C) 2026 The cfisac authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

"""Doppler-aware GLRT sensing simulator for cell-free ISAC networks."""

from ._core import (
    ConfigError,
    RankDeficient,
    bistatic_doppler,
    calibrate,
    case1,
    case2,
    case3,
    config_hash,
    config_keys,
    detect,
    gamma_threshold,
    glrt_statistic,
    ml_rcs_estimate,
)

__all__ = [
    "ConfigError",
    "RankDeficient",
    "bistatic_doppler",
    "calibrate",
    "case1",
    "case2",
    "case3",
    "config_hash",
    "config_keys",
    "detect",
    "gamma_threshold",
    "glrt_statistic",
    "ml_rcs_estimate",
]
