// SPDX-License-Identifier: Apache-2.0
//
// cfisac - Doppler-aware sensing simulator for cell-free ISAC networks
// Copyright (C) 2026 The cfisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "cfisac/experiments.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cfisac
{
    /// Flat dotted-key run configuration. Every key has a default.
    struct RunConfig
    {
        SimulationConfig sim;
        std::uint64_t seed = 1;
        std::size_t trials = 0; // 0 selects the per-case default
        std::string out_dir = ".";

        /// Where each explicitly set key came from ("<file>:<line>" or "--set").
        std::map<std::string, std::string> origin;
    };

    /// Default trial counts per subcommand.
    std::size_t default_trials(const std::string &subcommand);

    /// Every recognized key, sorted.
    std::vector<std::string> config_keys();

    /// Sets one key; throws ConfigError naming the key for unknown keys or bad values.
    void apply_setting(RunConfig &cfg, const std::string &key, const std::string &value);

    /// Current value of a key rendered as in a config file.
    std::string get_setting(const RunConfig &cfg, const std::string &key);

    /// Parses `key = value` lines (`#` starts a comment) from `path` (empty: defaults only),
    /// then applies `overrides` of the form key=value, then validates. Errors carry the key
    /// and, for file entries, the line number.
    RunConfig parse_config(const std::string &path, const std::vector<std::string> &overrides = {});

    /// Same grammar from an in-memory text; `source` names it in error messages.
    RunConfig parse_config_text(const std::string &text, const std::string &source,
                                const std::vector<std::string> &overrides = {});

    /// Validates the assembled configuration, attributing failures to their origin.
    void validate(const RunConfig &cfg);

    /// 16-hex-digit FNV-1a digest of every output-affecting key. Seed, output location and
    /// thread count are excluded.
    std::string config_hash(const RunConfig &cfg);
}
