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

#include "cfisac/velocity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace cfisac
{
    namespace
    {
        // Counts evaluations and tracks the best point seen.
        class Tracker
        {
        public:
            explicit Tracker(const Objective &f) : f_(f) {}

            double operator()(const Velocity3 &v)
            {
                ++evaluations;
                const double value = f_(v);
                if (value > best_value)
                {
                    best_value = value;
                    best = v;
                }
                return value;
            }

            std::size_t evaluations = 0;
            double best_value = -std::numeric_limits<double>::infinity();
            Velocity3 best;

        private:
            const Objective &f_;
        };

        Velocity3 uniform_in(const SearchBox &box, Rng &rng)
        {
            if (box.nu_max == 0.0)
                return {};
            return {uniform(rng, -box.nu_max, box.nu_max), uniform(rng, -box.nu_max, box.nu_max),
                    uniform(rng, -box.nu_max, box.nu_max)};
        }

        VelocityEstimate lattice_search(Tracker &t, const SearchBox &box, int points)
        {
            if (points < 2)
                throw ConfigError("grid search needs at least 2 points per axis");
            t(Velocity3{});
            const std::vector<double> axis = lattice_axis(box, points);
            for (double vx : axis)
                for (double vy : axis)
                    for (double vz : axis)
                        t({vx, vy, vz});
            VelocityEstimate e;
            e.v = t.best;
            e.statistic = t.best_value;
            e.evaluations = t.evaluations;
            return e;
        }
    }

    Velocity3 SearchBox::clamp(const Velocity3 &v) const
    {
        auto c = [&](double x)
        { return std::clamp(x, -nu_max, nu_max); };
        return {c(v.x), c(v.y), c(v.z)};
    }

    bool SearchBox::contains(const Velocity3 &v) const
    {
        return std::abs(v.x) <= nu_max && std::abs(v.y) <= nu_max && std::abs(v.z) <= nu_max;
    }

    std::string to_string(EstimatorMethod m)
    {
        switch (m)
        {
        case EstimatorMethod::grid:
            return "grid";
        case EstimatorMethod::grad_ri:
            return "grad_ri";
        case EstimatorMethod::grad_cgi:
            return "grad_cgi";
        case EstimatorMethod::pso_ri:
            return "pso_ri";
        case EstimatorMethod::pso_cgi:
            return "pso_cgi";
        }
        return "unknown";
    }

    EstimatorMethod parse_method(const std::string &name)
    {
        for (EstimatorMethod m : all_methods)
            if (to_string(m) == name)
                return m;
        throw ConfigError("estimator.method: unknown method '" + name + "'");
    }

    void EstimatorConfig::validate() const
    {
        auto require = [](bool ok, const char *key, const char *what)
        {
            if (!ok)
                throw ConfigError(std::string("estimator.") + key + ": " + what);
        };
        require(grid_points >= 2, "grid_points", "must be >= 2");
        require(coarse_points >= 2, "coarse_points", "must be >= 2");
        require(pso_swarm >= 2, "pso_swarm", "must be >= 2");
        require(pso_iterations >= 1, "pso_iterations", "must be >= 1");
        require(pso_patience >= 0, "pso_patience", "must be >= 0");
        require(pso_tol >= 0.0, "pso_tol", "must be >= 0");
        require(pso_inertia >= 0.0 && pso_inertia < 1.0, "pso_inertia", "must lie in [0, 1)");
        require(pso_c1 >= 0.0 && pso_c2 >= 0.0, "pso_c1", "acceleration coefficients must be >= 0");
        // Convergent region of the gbest PSO update.
        require(pso_c1 + pso_c2 < 2.0 * (1.0 + pso_inertia), "pso_c1", "c1 + c2 must be < 2 (1 + w)");
        require(grad_max_iters >= 1, "grad_max_iters", "must be >= 1");
        require(grad_fd_step > 0.0, "grad_fd_step", "must be positive");
        require(grad_init_step > 0.0, "grad_init_step", "must be positive");
        require(grad_backtrack > 0.0 && grad_backtrack < 1.0, "grad_backtrack", "must lie in (0, 1)");
        require(grad_tol >= 0.0, "grad_tol", "must be >= 0");
        require(grad_min_step > 0.0, "grad_min_step", "must be positive");
    }

    std::vector<double> lattice_axis(const SearchBox &box, int points)
    {
        std::vector<double> axis(points);
        for (int i = 0; i < points; ++i)
            axis[i] = -box.nu_max + box.width() * i / (points - 1);
        if (points % 2 == 1)
            axis[points / 2] = 0.0; // exact zero on odd lattices
        return axis;
    }

    VelocityEstimate grid_search(const Objective &f, const SearchBox &box, int points)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Tracker t(f);
        VelocityEstimate e = lattice_search(t, box, points);
        e.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return e;
    }

    Velocity3 coarse_grid_init(const Objective &f, const SearchBox &box, int points)
    {
        Tracker t(f);
        return lattice_search(t, box, points).v;
    }

    VelocityEstimate gradient_refine(const Objective &f, const SearchBox &box, const Velocity3 &init,
                                     const EstimatorConfig &cfg)
    {
        cfg.validate();
        const auto t0 = std::chrono::steady_clock::now();
        const std::size_t budget = cfg.gradient_budget();

        Tracker t(f);
        Velocity3 x = box.clamp(init);
        double fx = t(x);

        // Central differences on the projected stencil.
        auto gradient = [&](const Velocity3 &at)
        {
            Eigen::Vector3d g;
            const Eigen::Vector3d xv = at.vec();
            for (int d = 0; d < 3; ++d)
            {
                Eigen::Vector3d lo = xv, hi = xv;
                hi(d) += cfg.grad_fd_step;
                lo(d) -= cfg.grad_fd_step;
                const Velocity3 vh = box.clamp(Velocity3::from(hi));
                const Velocity3 vl = box.clamp(Velocity3::from(lo));
                const double span = vh.vec()(d) - vl.vec()(d);
                const double fh = t(vh);
                const double fl = t(vl);
                g(d) = span > 0.0 ? (fh - fl) / span : 0.0;
            }
            return g;
        };

        VelocityEstimate e;
        e.history.push_back(fx);
        Eigen::Vector3d g = gradient(x);
        // Inverse-curvature estimate of -f; the first direction is the scaled gradient.
        Eigen::Matrix3d H = Eigen::Matrix3d::Identity();
        bool scaled = false;
        for (int it = 0; it < cfg.grad_max_iters && t.evaluations + 7 <= budget; ++it)
        {
            const double gn = g.norm();
            if (!(gn > 0.0))
                break;
            if (!scaled)
            {
                H = Eigen::Matrix3d::Identity() * (cfg.grad_init_step / gn);
                scaled = true;
            }
            Eigen::Vector3d dir = H * g;
            if (!(dir.dot(g) > 0.0))
            {
                H = Eigen::Matrix3d::Identity() * (cfg.grad_init_step / gn);
                dir = H * g;
            }
            if (dir.norm() > box.width())
                dir *= box.width() / dir.norm();

            const Eigen::Vector3d xv = x.vec();
            bool accepted = false;
            double scale = 1.0;
            Velocity3 xn;
            double fn = fx;
            while (scale * dir.norm() >= cfg.grad_min_step && t.evaluations < budget)
            {
                xn = box.clamp(Velocity3::from(xv + scale * dir));
                if (xn == x)
                    break;
                fn = t(xn);
                if (fn > fx)
                {
                    accepted = true;
                    break;
                }
                scale *= cfg.grad_backtrack;
            }
            if (!accepted)
                break;

            const double rel = (fn - fx) / std::max(std::abs(fx), std::numeric_limits<double>::min());
            const Eigen::Vector3d step = xn.vec() - xv;
            x = xn;
            fx = fn;
            e.history.push_back(fx);
            if (rel < cfg.grad_tol || step.norm() < cfg.grad_min_step || t.evaluations + 6 > budget)
                break;

            const Eigen::Vector3d gn_new = gradient(x);
            const Eigen::Vector3d yv = g - gn_new; // change of the gradient of -f
            const double sy = step.dot(yv);
            if (sy > 1e-12 * step.norm() * yv.norm())
            {
                const double rho = 1.0 / sy;
                const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
                H = (I - rho * step * yv.transpose()) * H * (I - rho * yv * step.transpose()) +
                    rho * step * step.transpose();
            }
            else
                scaled = false;
            g = gn_new;
        }

        // Finite-difference probes may have landed higher than the iterate.
        e.v = t.best_value > fx ? t.best : x;
        e.statistic = std::max(fx, t.best_value);
        e.evaluations = t.evaluations;
        e.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return e;
    }

    VelocityEstimate pso_search(const Objective &f, const SearchBox &box, PsoInit init,
                                const EstimatorConfig &cfg, Rng &rng)
    {
        cfg.validate();
        const auto t0 = std::chrono::steady_clock::now();
        Tracker t(f);

        const int n = cfg.pso_swarm;
        const double vmax = box.width();
        std::vector<Eigen::Vector3d> pos(n), vel(n), pbest(n);
        std::vector<double> pbest_value(n);

        t(Velocity3{}); // zero-velocity seed
        int first_random = 0;
        if (init == PsoInit::coarse_grid)
        {
            pos[0] = coarse_grid_init(std::ref(t), box, cfg.coarse_points).vec();
            pos[1] = Eigen::Vector3d::Zero();
            first_random = 2;
        }
        for (int i = first_random; i < n; ++i)
            pos[i] = uniform_in(box, rng).vec();
        for (int i = 0; i < n; ++i)
        {
            const Velocity3 jitter = uniform_in(SearchBox{box.nu_max / 4.0}, rng);
            vel[i] = jitter.vec();
            pbest[i] = pos[i];
            pbest_value[i] = t(Velocity3::from(pos[i]));
        }

        VelocityEstimate e;
        e.history.push_back(t.best_value);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        int stalled = 0;
        for (int it = 0; it < cfg.pso_iterations; ++it)
        {
            if (cfg.pso_patience > 0 && stalled >= cfg.pso_patience)
                break;
            const double before = t.best_value;
            const Eigen::Vector3d gbest = t.best.vec();
            // All random draws happen before any evaluation of this iteration.
            for (int i = 0; i < n; ++i)
            {
                for (int d = 0; d < 3; ++d)
                {
                    const double r1 = unit(rng);
                    const double r2 = unit(rng);
                    double v = cfg.pso_inertia * vel[i](d) + cfg.pso_c1 * r1 * (pbest[i](d) - pos[i](d)) +
                               cfg.pso_c2 * r2 * (gbest(d) - pos[i](d));
                    vel[i](d) = std::clamp(v, -vmax, vmax);
                }
                pos[i] = box.clamp(Velocity3::from(pos[i] + vel[i])).vec();
            }
            for (int i = 0; i < n; ++i)
            {
                const double value = t(Velocity3::from(pos[i]));
                if (value > pbest_value[i])
                {
                    pbest_value[i] = value;
                    pbest[i] = pos[i];
                }
            }
            stalled = t.best_value > before + cfg.pso_tol * std::abs(before) ? 0 : stalled + 1;
            e.history.push_back(t.best_value);
        }

        e.v = t.best;
        e.statistic = t.best_value;
        e.evaluations = t.evaluations;
        e.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return e;
    }

    VelocityEstimate estimate_velocity(const Objective &f, const SearchBox &box, const EstimatorConfig &cfg,
                                       std::uint64_t seed)
    {
        cfg.validate();
        Rng rng(seed);
        const auto t0 = std::chrono::steady_clock::now();
        VelocityEstimate e;
        switch (cfg.method)
        {
        case EstimatorMethod::grid:
            e = grid_search(f, box, cfg.grid_points);
            break;
        case EstimatorMethod::grad_ri:
        case EstimatorMethod::grad_cgi:
        {
            Tracker t(f);
            const double at_zero = t(Velocity3{});
            const Velocity3 init = cfg.method == EstimatorMethod::grad_ri
                                       ? uniform_in(box, rng)
                                       : coarse_grid_init(std::ref(t), box, cfg.coarse_points);
            e = gradient_refine(f, box, init, cfg);
            e.evaluations += t.evaluations;
            if (at_zero > e.statistic)
            {
                e.v = {};
                e.statistic = at_zero;
            }
            break;
        }
        case EstimatorMethod::pso_ri:
            e = pso_search(f, box, PsoInit::random, cfg, rng);
            break;
        case EstimatorMethod::pso_cgi:
            e = pso_search(f, box, PsoInit::coarse_grid, cfg, rng);
            break;
        }
        e.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return e;
    }

    std::optional<std::array<double, 3>> relative_component_error(const Velocity3 &v_hat, const Velocity3 &v_true)
    {
        const double speed = v_true.norm();
        if (!(speed > 0.0))
            return std::nullopt;
        return std::array<double, 3>{std::abs(v_hat.x - v_true.x) / speed, std::abs(v_hat.y - v_true.y) / speed,
                                     std::abs(v_hat.z - v_true.z) / speed};
    }

    std::array<double, 3> per_component_error(const Velocity3 &v_hat, const Velocity3 &v_true)
    {
        auto rel = [](double est, double truth)
        {
            const double err = std::abs(est - truth);
            if (truth == 0.0)
                return err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            return err / std::abs(truth);
        };
        return {rel(v_hat.x, v_true.x), rel(v_hat.y, v_true.y), rel(v_hat.z, v_true.z)};
    }
}
