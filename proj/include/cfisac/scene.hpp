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

#include "cfisac/geometry.hpp"
#include "cfisac/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cfisac
{
    struct ScenarioConfig
    {
        double area_side = 500.0; // m, square footprint
        int n_aps = 16;
        int n_tx = 8;
        int n_rx = 8;
        int n_ues = 8;
        int n_regions = 4;
        int serving_aps = 4; // M_c
        int n_antennas = 4;
        double ap_height = 10.0;
        double ue_height = 1.65;
        double target_height_min = 20.0;
        double target_height_max = 100.0;
        double nu_max = 150.0;           // m/s
        double rcs_variance_dbsm = 10.0; // E|alpha|^2
        double ap_power_w = 2.0;
        double noise_psd_dbm_hz = -174.0;
        double noise_figure_db = 9.0;
        int cells_per_axis = 5;   // radar cells per region side
        int tx_per_region = 8;    // |M_p^tx|
        int rx_per_region = 8;    // |M_p^rx|, closest rAPs
        double rcs_corr_len = 0.5; // rad, Gaussian angular correlation
        std::string roles;        // optional explicit role list, one 't'/'r' per AP

        /// Throws ConfigError naming the offending field.
        void validate() const;

        double rcs_variance() const;
    };

    enum class ApRole
    {
        transmit,
        receive
    };

    struct APNode
    {
        int id = 0;
        Position3 position;
        ApRole role = ApRole::transmit;
        int n_antennas = 1;
        ArraySpec array;
    };

    struct UENode
    {
        int id = 0;
        Position3 position;
    };

    struct TargetState
    {
        Position3 position;
        Velocity3 velocity;
        bool present = true;
        int region = 0;
    };

    struct Region
    {
        int id = 0;
        double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
        std::vector<Position3> cells; // ground-plane cell centers (z = 0)

        Position3 centroid() const { return {(x0 + x1) / 2, (y0 + y1) / 2, 0.0}; }
    };

    struct RegionGrid
    {
        std::vector<Region> regions;
    };

    /// Raw random layout, before roles and associations.
    struct SceneLayout
    {
        std::vector<APNode> aps;
        std::vector<UENode> ues;
        TargetState target;
        RegionGrid grid;
        std::vector<Position3> inspected; // one inspected point per region
    };

    SceneLayout deploy_scene(const ScenarioConfig &cfg, std::uint64_t seed, bool target_present = true);

    /// Splits S regions into a near-square rows x cols tiling of the area.
    RegionGrid make_region_grid(const ScenarioConfig &cfg);

    /// Assigns roles in place. Explicit `cfg.roles` wins, otherwise a random balanced split.
    void partition_aps(std::vector<APNode> &aps, const ScenarioConfig &cfg, Rng &rng);

    // ---- Large-scale fading ---------------------------------------------------

    /// One-way AP-UE / AP-AP pathloss in dB: -30.5 - 36.7 log10(d).
    double pathloss_db(double distance_m);
    double one_way_gain(double distance_m);
    double rician_k_factor(double distance_m);

    /// Bistatic radar-equation gain lambda^2 / ((4 pi)^3 d_tx^2 d_rx^2); RCS excluded.
    double bistatic_gain(const Position3 &target, const Position3 &tap, const Position3 &rap,
                         const PhysicalConstants &consts);

    struct LSFTable
    {
        RMatrix ue_ap;   // beta_{k,m}, K x M
        RMatrix ue_ap_k; // K_{k,m}
        RMatrix ap_ap;   // beta_{m,m'}, M x M, zero diagonal
        RMatrix ap_ap_k;
    };

    LSFTable large_scale_fading(const std::vector<APNode> &aps, const std::vector<UENode> &ues);

    // ---- Associations ---------------------------------------------------------

    struct AssociationMap
    {
        std::vector<std::vector<int>> ue_taps;     // M_k^tx, AP ids
        std::vector<std::vector<int>> tap_ues;     // K_m, indexed by AP id
        std::vector<std::vector<int>> region_taps; // M_p^tx
        std::vector<std::vector<int>> region_raps; // M_p^rx
        std::vector<std::vector<int>> tap_regions; // S_m, indexed by AP id
    };

    /// Each UE picks the `serving` tAPs with largest beta; K_m by inversion.
    void associate_users(AssociationMap &assoc, int n_aps, const std::vector<int> &tap_ids,
                         const LSFTable &lsf, int serving);

    /// Each region takes the `n_tx` tAPs and `n_rx` rAPs closest to its centroid.
    /// Every rAP is then guaranteed to cover at least one region.
    void associate_regions(AssociationMap &assoc, const RegionGrid &grid,
                           const std::vector<APNode> &aps, int n_tx, int n_rx);

    // ---- RCS --------------------------------------------------------------------

    /// sigma^2 exp(-dphi^2 / (2 corr^2)), dphi the angle between target->tAP directions.
    RMatrix rcs_covariance(const Position3 &target, const std::vector<Position3> &taps,
                           double sigma_alpha_sq, double corr_len);

    /// alpha ~ CN(0, R) using the PSD square root of R.
    CVector draw_rcs(const RMatrix &covariance, Rng &rng);

    // ---- Assembled network ------------------------------------------------------

    struct Network
    {
        ScenarioConfig cfg;
        PhysicalConstants consts;
        std::vector<APNode> aps;
        std::vector<UENode> ues;
        TargetState target;
        RegionGrid grid;
        std::vector<Position3> inspected;
        std::vector<int> tx_ids; // M^tx in ascending id order
        std::vector<int> rx_ids; // M^rx
        LSFTable lsf;
        AssociationMap assoc;

        std::vector<Position3> tap_positions() const;
    };

    Network build_network(const ScenarioConfig &cfg, const PhysicalConstants &consts,
                          std::uint64_t seed, bool target_present = true);
}
