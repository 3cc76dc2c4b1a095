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

#include "cfisac/channel.hpp"
#include "cfisac/ofdm.hpp"

#include <cstdint>
#include <vector>

namespace cfisac
{
    /// Per-subcarrier precoder, one N_a vector per subcarrier.
    using SubcarrierPrecoder = std::vector<CVector>;

    /// w = conj(h_hat) / sqrt(E||h_hat||^2). Throws ConfigError for zero normalization.
    SubcarrierPrecoder mrt_precoder(const ChannelEstimate &estimate);

    /// Steering vector of tAP `tap` toward the inspected cell.
    CVector sensing_beamformer(const APNode &tap, const Position3 &cell);

    struct PowerAllocation
    {
        std::vector<double> mu;  // per served UE, in K_m order
        std::vector<double> eta; // per served region, in S_m order

        double total() const;
    };

    /// Equal split of the budget over every served stream; all-zero when nothing is served.
    PowerAllocation allocate_power_uniform(int n_ues, int n_regions, double power_w);

    /// Unit-modulus QPSK, Nc x Ns.
    CMatrix qpsk_symbols(int nc, int ns, Rng &rng);

    /// Transmitted frame of one tAP. Column n + Nc n' holds s(n, n').
    struct TxFrame
    {
        int nc = 0;
        int ns = 0;
        CMatrix s; // N_a x (Nc Ns)

        auto at(int n, int n_sym) const { return s.col(n + nc * n_sym); }
    };

    /// s(n,n') = sum_k sqrt(mu_k) w_k(n) x_k(n,n') + sum_i sqrt(eta_i) w_0(p_i) x_0(n,n').
    TxFrame transmit_frame(const std::vector<SubcarrierPrecoder> &comm_precoders,
                           const std::vector<CVector> &sensing_beams,
                           const PowerAllocation &allocation,
                           const std::vector<CMatrix> &ue_symbols,
                           const CMatrix &sensing_symbols,
                           const OFDMGrid &grid, int n_antennas);

    struct WaveformOptions
    {
        bool coherent_sensing_stream = true; // one x_0 shared by every tAP
        bool perfect_csi = false;
        int pilot_length = 0; // tau_p, 0 selects K
    };

    struct FrameSet
    {
        std::vector<TxFrame> frames; // aligned with Network::tx_ids
        std::vector<PowerAllocation> allocations;
        std::vector<CMatrix> sensing_symbols; // one entry when coherent, else per tAP
    };

    /// Draws uplink channels, estimates, precoders and symbols for every tAP and builds
    /// its frame. `noise_var` sets the pilot SNR of the estimation proxy.
    FrameSet assemble_frames(const Network &net, const OFDMGrid &grid, const WaveformOptions &opts,
                             double noise_var, std::uint64_t seed);
}
