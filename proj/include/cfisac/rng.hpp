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

#include "cfisac/types.hpp"

#include <cstdint>
#include <random>

namespace cfisac
{
    using Rng = std::mt19937_64;

    // splitmix64 finalizer, used to derive independent stream seeds
    constexpr std::uint64_t mix_seed(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
    {
        return mix_seed(mix_seed(master) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
    }

    /// Named sub-streams of one trial; each gets its own generator so that
    /// changing how many draws one stage makes never perturbs another stage.
    enum class Stream : std::uint64_t
    {
        scene = 1,
        roles,
        uplink,
        estimation,
        symbols,
        rcs,
        direct,
        noise,
        estimator,
    };

    inline Rng make_rng(std::uint64_t trial_seed, Stream s)
    {
        return Rng(derive_seed(trial_seed, static_cast<std::uint64_t>(s)));
    }

    inline double uniform(Rng &rng, double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    inline cplx complex_normal(Rng &rng, double variance = 1.0)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
        const double re = n(rng);
        const double im = n(rng);
        return {re, im};
    }
}
