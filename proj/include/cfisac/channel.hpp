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

#include "cfisac/ofdm.hpp"
#include "cfisac/scene.hpp"

#include <vector>

namespace cfisac
{
    /// How the delay phase rho(n) is indexed.
    enum class DelayConvention
    {
        pair,    // tau_{i,m,m'}: true bistatic delay of each tAP/rAP pair
        per_cell // tau_i: one reference delay shared by all pairs of the cell
    };

    // ---- Target-reflected sensing channel ------------------------------------

    /// H(n, n') = gain * A * rho(n) * xi(n'), an Na x Na rank-one channel.
    struct SensingChannelFactors
    {
        cplx gain;       // alpha * sqrt(beta)
        double beta = 0; // bistatic large-scale gain, RCS excluded
        CMatrix A;       // a_rx(AOA) a_tx(AOD)^H
        double delay = 0;
        double doppler = 0;
        CVector rho; // Nc delay phases
        CVector xi;  // Ns Doppler phases

        CMatrix at(int n, int n_sym) const { return gain * rho(n) * xi(n_sym) * A; }
    };

    /// Mean pair delay of the cell, used by DelayConvention::per_cell.
    double cell_reference_delay(const Network &net, const Position3 &cell);

    /// exp(-j 2 pi n tau / T), n = 0..Nc-1.
    CVector delay_phases(double delay, const OFDMGrid &grid);

    /// exp(j 2 pi n' f_d T_s), n' = 0..Ns-1.
    CVector doppler_phases(double doppler, const OFDMGrid &grid);

    /// Sensing channel from tAP `tap` via the target at `cell` to rAP `rap` (AP ids),
    /// for a given RCS coefficient.
    SensingChannelFactors sensing_channel(const Network &net, const Position3 &cell, const Velocity3 &v,
                                          int rap, int tap, cplx alpha, const OFDMGrid &grid,
                                          DelayConvention convention = DelayConvention::pair);

    // ---- Direct tAP -> rAP channel (cancelled before processing) ----------------

    struct DirectChannel
    {
        double kappa = 0;             // sqrt(beta / (1 + K))
        std::vector<CMatrix> nlos;    // G_bar(n), Nc entries
        CVector los;                  // ell(n) = sqrt(K) exp(j psi(n))
        CMatrix V;                    // LoS array outer product

        CMatrix at(int n) const { return kappa * (nlos[n] + los(n) * V); }
    };

    /// Rician draw with identity NLoS covariance; phase psi(n) redrawn per subcarrier.
    DirectChannel direct_ap_channel(double beta, double k_factor, const CMatrix &los_response,
                                    int nc, Rng &rng);

    DirectChannel direct_ap_channel(const Network &net, int rap, int tap, const OFDMGrid &grid, Rng &rng);

    // ---- UE -> AP channel and its estimate ---------------------------------------

    struct UplinkChannel
    {
        double beta = 0;
        double k_factor = 0;
        CVector los_steering;
        std::vector<CVector> h; // per subcarrier
    };

    UplinkChannel ue_ap_channel(double beta, double k_factor, const CVector &los_steering, int nc, Rng &rng);

    UplinkChannel ue_ap_channel(const Network &net, int ue, int ap, const OFDMGrid &grid, Rng &rng);

    struct ChannelEstimate
    {
        std::vector<CVector> h_hat; // per subcarrier
        double mean_sq_norm = 0;    // E[||h_hat||^2], analytic
    };

    /// Scalar-MMSE proxy: h_hat = c (h + e), e ~ CN(0, beta/snr I), c = snr/(1+snr).
    ChannelEstimate estimate_channel(const UplinkChannel &h_true, double pilot_snr_linear, Rng &rng);

    /// h_hat = h, with E||h||^2 = beta Na.
    ChannelEstimate perfect_estimate(const UplinkChannel &h_true);

    /// tau_p P beta / sigma^2.
    double pilot_snr(int pilot_length, double power_w, double beta, double noise_var);
}
