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

#include "cfisac/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfisac
{
    namespace
    {
        void require(bool ok, const char *field, const char *what)
        {
            if (!ok)
                throw ConfigError(std::string("scenario.") + field + ": " + what);
        }

        double distance(const Position3 &a, const Position3 &b)
        {
            return (a.vec() - b.vec()).norm();
        }

        // Indices of `candidates` sorted by distance to p, ties by id.
        std::vector<int> nearest(const Position3 &p, const std::vector<APNode> &aps,
                                 const std::vector<int> &candidates, int count)
        {
            std::vector<int> ids = candidates;
            std::stable_sort(ids.begin(), ids.end(), [&](int a, int b)
                             { return distance(p, aps[a].position) < distance(p, aps[b].position); });
            ids.resize(std::min<std::size_t>(ids.size(), static_cast<std::size_t>(count)));
            std::sort(ids.begin(), ids.end());
            return ids;
        }
    }

    void ScenarioConfig::validate() const
    {
        require(area_side > 0.0 && std::isfinite(area_side), "area_side", "must be positive");
        require(n_aps >= 2, "n_aps", "must be >= 2");
        require(n_tx >= 1, "n_tx", "must be >= 1");
        require(n_rx >= 1, "n_rx", "must be >= 1");
        require(n_tx + n_rx == n_aps, "n_tx", "n_tx + n_rx must equal n_aps");
        require(n_ues >= 1, "n_ues", "must be >= 1");
        require(n_regions >= 1, "n_regions", "must be >= 1");
        require(serving_aps >= 1 && serving_aps <= n_tx, "serving_aps", "must be in [1, n_tx]");
        require(n_antennas >= 1, "n_antennas", "must be >= 1");
        require(ap_height >= 0.0, "ap_height", "must be >= 0");
        require(ue_height >= 0.0, "ue_height", "must be >= 0");
        require(target_height_min >= 0.0 && target_height_max >= target_height_min,
                "target_height_max", "height range must satisfy 0 <= min <= max");
        require(nu_max >= 0.0 && std::isfinite(nu_max), "nu_max", "must be >= 0");
        require(std::isfinite(rcs_variance_dbsm), "rcs_variance_dbsm", "must be finite");
        require(ap_power_w > 0.0, "ap_power_w", "must be positive");
        require(cells_per_axis >= 1, "cells_per_axis", "must be >= 1");
        require(tx_per_region >= 1 && tx_per_region <= n_tx, "tx_per_region", "must be in [1, n_tx]");
        require(rx_per_region >= 1 && rx_per_region <= n_rx, "rx_per_region", "must be in [1, n_rx]");
        require(rcs_corr_len > 0.0, "rcs_corr_len", "must be positive");
        if (!roles.empty())
        {
            require(static_cast<int>(roles.size()) == n_aps, "roles", "needs one entry per AP");
            const auto ntx = std::count(roles.begin(), roles.end(), 't');
            const auto nrx = std::count(roles.begin(), roles.end(), 'r');
            require(ntx + nrx == n_aps, "roles", "entries must be 't' or 'r'");
            require(ntx == n_tx && nrx == n_rx, "roles", "counts must match n_tx / n_rx");
        }
    }

    double ScenarioConfig::rcs_variance() const
    {
        return std::pow(10.0, rcs_variance_dbsm / 10.0);
    }

    RegionGrid make_region_grid(const ScenarioConfig &cfg)
    {
        int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(cfg.n_regions))));
        while (cfg.n_regions % rows != 0)
            --rows;
        const int cols = cfg.n_regions / rows;
        const double w = cfg.area_side / cols;
        const double h = cfg.area_side / rows;

        RegionGrid g;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
            {
                Region reg;
                reg.id = r * cols + c;
                reg.x0 = c * w;
                reg.x1 = (c + 1) * w;
                reg.y0 = r * h;
                reg.y1 = (r + 1) * h;
                const int n = cfg.cells_per_axis;
                for (int iy = 0; iy < n; ++iy)
                    for (int ix = 0; ix < n; ++ix)
                        reg.cells.push_back({reg.x0 + (ix + 0.5) * w / n, reg.y0 + (iy + 0.5) * h / n, 0.0});
                g.regions.push_back(std::move(reg));
            }
        return g;
    }

    SceneLayout deploy_scene(const ScenarioConfig &cfg, std::uint64_t seed, bool target_present)
    {
        cfg.validate();
        Rng rng = make_rng(seed, Stream::scene);
        SceneLayout s;
        s.grid = make_region_grid(cfg);

        ArraySpec array;
        for (int m = 0; m < cfg.n_aps; ++m)
        {
            APNode ap;
            ap.id = m;
            ap.position = {uniform(rng, 0.0, cfg.area_side), uniform(rng, 0.0, cfg.area_side), cfg.ap_height};
            ap.n_antennas = cfg.n_antennas;
            ap.array = array;
            s.aps.push_back(ap);
        }
        for (int k = 0; k < cfg.n_ues; ++k)
            s.ues.push_back({k, {uniform(rng, 0.0, cfg.area_side), uniform(rng, 0.0, cfg.area_side), cfg.ue_height}});

        auto random_cell = [&](const Region &reg)
        {
            std::uniform_int_distribution<std::size_t> pick(0, reg.cells.size() - 1);
            Position3 p = reg.cells[pick(rng)];
            p.z = uniform(rng, cfg.target_height_min, cfg.target_height_max);
            return p;
        };

        std::uniform_int_distribution<int> pick_region(0, cfg.n_regions - 1);
        s.target.region = pick_region(rng);
        s.target.present = target_present;
        s.target.position = random_cell(s.grid.regions[s.target.region]);

        // Uniform direction on the sphere, speed uniform in [0, nu_max].
        const double uz = uniform(rng, -1.0, 1.0);
        const double az = uniform(rng, -pi, pi);
        const double speed = uniform(rng, 0.0, cfg.nu_max);
        const double rxy = std::sqrt(std::max(0.0, 1.0 - uz * uz));
        s.target.velocity = {speed * rxy * std::cos(az), speed * rxy * std::sin(az), speed * uz};

        for (const Region &reg : s.grid.regions)
        {
            if (target_present && reg.id == s.target.region)
                s.inspected.push_back(s.target.position);
            else
                s.inspected.push_back(random_cell(reg));
        }
        return s;
    }

    void partition_aps(std::vector<APNode> &aps, const ScenarioConfig &cfg, Rng &rng)
    {
        if (cfg.n_tx + cfg.n_rx != static_cast<int>(aps.size()))
            throw ConfigError("partition_aps: n_tx + n_rx must equal the number of APs");
        if (!cfg.roles.empty())
        {
            cfg.validate();
            for (std::size_t m = 0; m < aps.size(); ++m)
                aps[m].role = cfg.roles[m] == 't' ? ApRole::transmit : ApRole::receive;
            return;
        }
        std::vector<int> order(aps.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t j = 0; j < order.size(); ++j)
            aps[order[j]].role = static_cast<int>(j) < cfg.n_tx ? ApRole::transmit : ApRole::receive;
    }

    double pathloss_db(double distance_m)
    {
        if (!(distance_m > 0.0))
            throw DegenerateGeometry("pathloss: zero distance");
        return -30.5 - 36.7 * std::log10(distance_m);
    }

    double one_way_gain(double distance_m)
    {
        return std::pow(10.0, pathloss_db(distance_m) / 10.0);
    }

    double rician_k_factor(double distance_m)
    {
        return std::pow(10.0, 1.3 - 0.003 * distance_m);
    }

    double bistatic_gain(const Position3 &target, const Position3 &tap, const Position3 &rap,
                         const PhysicalConstants &consts)
    {
        const double dt = distance(target, tap);
        const double dr = distance(target, rap);
        if (!(dt > 0.0) || !(dr > 0.0))
            throw DegenerateGeometry("bistatic_gain: target coincides with an AP");
        const double lambda = consts.wavelength();
        return lambda * lambda / (std::pow(4.0 * pi, 3) * dt * dt * dr * dr);
    }

    LSFTable large_scale_fading(const std::vector<APNode> &aps, const std::vector<UENode> &ues)
    {
        const auto M = static_cast<Eigen::Index>(aps.size());
        const auto K = static_cast<Eigen::Index>(ues.size());
        LSFTable t;
        t.ue_ap.resize(K, M);
        t.ue_ap_k.resize(K, M);
        t.ap_ap = RMatrix::Zero(M, M);
        t.ap_ap_k = RMatrix::Zero(M, M);
        for (Eigen::Index k = 0; k < K; ++k)
            for (Eigen::Index m = 0; m < M; ++m)
            {
                const double d = distance(ues[k].position, aps[m].position);
                t.ue_ap(k, m) = one_way_gain(d);
                t.ue_ap_k(k, m) = rician_k_factor(d);
            }
        for (Eigen::Index a = 0; a < M; ++a)
            for (Eigen::Index b = 0; b < M; ++b)
            {
                if (a == b)
                    continue;
                const double d = distance(aps[a].position, aps[b].position);
                t.ap_ap(a, b) = one_way_gain(d);
                t.ap_ap_k(a, b) = rician_k_factor(d);
            }
        return t;
    }

    void associate_users(AssociationMap &assoc, int n_aps, const std::vector<int> &tap_ids,
                         const LSFTable &lsf, int serving)
    {
        if (serving < 1 || serving > static_cast<int>(tap_ids.size()))
            throw ConfigError("associate_users: serving AP count must be in [1, |M^tx|]");
        const auto K = lsf.ue_ap.rows();
        assoc.ue_taps.assign(K, {});
        assoc.tap_ues.assign(n_aps, {});
        for (Eigen::Index k = 0; k < K; ++k)
        {
            std::vector<int> ids = tap_ids;
            std::stable_sort(ids.begin(), ids.end(), [&](int a, int b)
                             { return lsf.ue_ap(k, a) > lsf.ue_ap(k, b); });
            ids.resize(serving);
            std::sort(ids.begin(), ids.end());
            for (int m : ids)
                assoc.tap_ues[m].push_back(static_cast<int>(k));
            assoc.ue_taps[k] = std::move(ids);
        }
    }

    void associate_regions(AssociationMap &assoc, const RegionGrid &grid,
                           const std::vector<APNode> &aps, int n_tx, int n_rx)
    {
        std::vector<int> taps, raps;
        for (const APNode &ap : aps)
            (ap.role == ApRole::transmit ? taps : raps).push_back(ap.id);

        const auto S = grid.regions.size();
        assoc.region_taps.assign(S, {});
        assoc.region_raps.assign(S, {});
        assoc.tap_regions.assign(aps.size(), {});
        for (std::size_t i = 0; i < S; ++i)
        {
            const Position3 c = grid.regions[i].centroid();
            assoc.region_taps[i] = nearest(c, aps, taps, n_tx);
            assoc.region_raps[i] = nearest(c, aps, raps, n_rx);
        }

        // Every rAP must inspect something: attach orphans to their closest region.
        for (int m : raps)
        {
            bool covered = false;
            for (const auto &set : assoc.region_raps)
                covered = covered || std::find(set.begin(), set.end(), m) != set.end();
            if (covered)
                continue;
            std::size_t best = 0;
            for (std::size_t i = 1; i < S; ++i)
                if (distance(aps[m].position, grid.regions[i].centroid()) <
                    distance(aps[m].position, grid.regions[best].centroid()))
                    best = i;
            auto &set = assoc.region_raps[best];
            set.insert(std::upper_bound(set.begin(), set.end(), m), m);
        }

        for (std::size_t i = 0; i < S; ++i)
            for (int m : assoc.region_taps[i])
                assoc.tap_regions[m].push_back(static_cast<int>(i));
    }

    RMatrix rcs_covariance(const Position3 &target, const std::vector<Position3> &taps,
                           double sigma_alpha_sq, double corr_len)
    {
        if (!(sigma_alpha_sq > 0.0))
            throw ConfigError("rcs_covariance: sigma_alpha^2 must be positive");
        const auto n = static_cast<Eigen::Index>(taps.size());
        std::vector<Eigen::Vector3d> u;
        for (const Position3 &p : taps)
            u.push_back(unit_vector(target, p));

        RMatrix R(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b)
            {
                const double dphi = std::acos(std::clamp(u[a].dot(u[b]), -1.0, 1.0));
                R(a, b) = a == b ? sigma_alpha_sq
                                 : sigma_alpha_sq * std::exp(-dphi * dphi / (2.0 * corr_len * corr_len));
            }
        return R;
    }

    CVector draw_rcs(const RMatrix &covariance, Rng &rng)
    {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(covariance);
        const RVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        CVector w(covariance.rows());
        for (Eigen::Index j = 0; j < w.size(); ++j)
            w(j) = complex_normal(rng) * root(j);
        return es.eigenvectors().cast<cplx>() * w;
    }

    std::vector<Position3> Network::tap_positions() const
    {
        std::vector<Position3> out;
        for (int m : tx_ids)
            out.push_back(aps[m].position);
        return out;
    }

    Network build_network(const ScenarioConfig &cfg, const PhysicalConstants &consts,
                          std::uint64_t seed, bool target_present)
    {
        SceneLayout layout = deploy_scene(cfg, seed, target_present);
        Rng role_rng = make_rng(seed, Stream::roles);
        partition_aps(layout.aps, cfg, role_rng);

        Network net;
        net.cfg = cfg;
        net.consts = consts;
        net.aps = std::move(layout.aps);
        net.ues = std::move(layout.ues);
        net.target = layout.target;
        net.grid = std::move(layout.grid);
        net.inspected = std::move(layout.inspected);
        for (const APNode &ap : net.aps)
            (ap.role == ApRole::transmit ? net.tx_ids : net.rx_ids).push_back(ap.id);

        net.lsf = large_scale_fading(net.aps, net.ues);
        associate_users(net.assoc, cfg.n_aps, net.tx_ids, net.lsf, cfg.serving_aps);
        associate_regions(net.assoc, net.grid, net.aps, cfg.tx_per_region, cfg.rx_per_region);
        return net;
    }
}
