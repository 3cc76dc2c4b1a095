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

// Shared helpers for the cfisac test suites.

#pragma once

#include "cfisac/rng.hpp"
#include "cfisac/types.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

namespace testing
{
    using namespace cfisac;

    inline Position3 random_position(Rng &rng, double side = 500.0, double zlo = 0.0, double zhi = 100.0)
    {
        return {uniform(rng, 0.0, side), uniform(rng, 0.0, side), uniform(rng, zlo, zhi)};
    }

    inline Velocity3 random_velocity(Rng &rng, double nu_max = 150.0)
    {
        return {uniform(rng, -nu_max, nu_max), uniform(rng, -nu_max, nu_max), uniform(rng, -nu_max, nu_max)};
    }

    inline CMatrix random_cmatrix(Rng &rng, Eigen::Index rows, Eigen::Index cols)
    {
        CMatrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
                m(i, j) = complex_normal(rng);
        return m;
    }

    inline CVector random_cvector(Rng &rng, Eigen::Index n)
    {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = complex_normal(rng);
        return v;
    }

    template <class Tag>
    double dist(const Triple<Tag> &a, const Triple<Tag> &b)
    {
        return (a.vec() - b.vec()).norm();
    }

    /// Largest per-component deviation.
    template <class Tag>
    double gap(const Triple<Tag> &a, const Triple<Tag> &b)
    {
        return (a.vec() - b.vec()).cwiseAbs().maxCoeff();
    }

    inline double rel_err(double a, double b)
    {
        const double scale = std::max(std::abs(a), std::abs(b));
        return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
    }
}
