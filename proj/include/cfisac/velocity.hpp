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

#include "cfisac/rng.hpp"
#include "cfisac/types.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cfisac
{
    /// Statistic to maximize over the velocity box.
    using Objective = std::function<double(const Velocity3 &)>;

    /// Axis-aligned box [-nu_max, nu_max]^3.
    struct SearchBox
    {
        double nu_max = 150.0;

        double width() const { return 2.0 * nu_max; }
        Velocity3 clamp(const Velocity3 &v) const;
        bool contains(const Velocity3 &v) const;
    };

    enum class EstimatorMethod
    {
        grid,
        grad_ri,
        grad_cgi,
        pso_ri,
        pso_cgi
    };

    inline constexpr std::array<EstimatorMethod, 5> all_methods = {
        EstimatorMethod::grid, EstimatorMethod::grad_ri, EstimatorMethod::grad_cgi,
        EstimatorMethod::pso_ri, EstimatorMethod::pso_cgi};

    std::string to_string(EstimatorMethod m);

    /// Throws ConfigError for an unknown name.
    EstimatorMethod parse_method(const std::string &name);

    struct EstimatorConfig
    {
        EstimatorMethod method = EstimatorMethod::pso_ri;
        int grid_points = 21;
        int coarse_points = 5;
        int pso_swarm = 30;
        int pso_iterations = 60;
        int pso_patience = 15; // iterations without relative gbest gain above pso_tol before stopping, 0 disables
        double pso_tol = 1e-6;
        double pso_inertia = 0.7298;
        double pso_c1 = 1.49618;
        double pso_c2 = 1.49618;
        int grad_max_iters = 100;
        double grad_fd_step = 0.5;   // m/s
        double grad_init_step = 5.0; // m/s
        double grad_backtrack = 0.5;
        double grad_tol = 1e-10;     // relative statistic change
        double grad_min_step = 1e-3; // m/s, line search gives up below this

        void validate() const;

        /// Evaluation budget of one gradient refinement (7 per iteration).
        std::size_t gradient_budget() const { return static_cast<std::size_t>(grad_max_iters) * 7; }
    };

    struct VelocityEstimate
    {
        Velocity3 v;
        double statistic = 0;
        std::size_t evaluations = 0;
        double wall_time = 0;        // seconds
        std::vector<double> history; // best statistic after each iteration
    };

    /// Lattice points -nu + 2 nu i / (p - 1), i = 0..p-1, on each axis.
    std::vector<double> lattice_axis(const SearchBox &box, int points);

    /// Exhaustive lattice search plus v = 0. Evaluations: points^3 + 1.
    VelocityEstimate grid_search(const Objective &f, const SearchBox &box, int points);

    /// Best point of a coarse lattice (plus v = 0).
    Velocity3 coarse_grid_init(const Objective &f, const SearchBox &box, int points);

    /// Projected quasi-Newton (BFGS) ascent on central finite differences with backtracking.
    /// The returned statistic never falls below f(init).
    VelocityEstimate gradient_refine(const Objective &f, const SearchBox &box, const Velocity3 &init,
                                     const EstimatorConfig &cfg);

    enum class PsoInit
    {
        random,
        coarse_grid
    };

    /// Global-best PSO; particle velocities clamped to the box width, positions to the box.
    /// gbest starts at v = 0.
    VelocityEstimate pso_search(const Objective &f, const SearchBox &box, PsoInit init,
                                const EstimatorConfig &cfg, Rng &rng);

    /// Runs cfg.method with its initialization; random draws come from `seed`.
    VelocityEstimate estimate_velocity(const Objective &f, const SearchBox &box, const EstimatorConfig &cfg,
                                       std::uint64_t seed);

    /// |v_hat_c - v_true_c| / ||v_true||; nullopt for a stationary target.
    std::optional<std::array<double, 3>> relative_component_error(const Velocity3 &v_hat, const Velocity3 &v_true);

    /// |v_hat_c - v_true_c| / |v_true_c| (infinite where the true component is zero).
    std::array<double, 3> per_component_error(const Velocity3 &v_hat, const Velocity3 &v_true);
}
