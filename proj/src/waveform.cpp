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

#include "cfisac/waveform.hpp"

#include <cmath>
#include <numeric>

namespace cfisac
{
    void OFDMGrid::validate(double nu_max, double c) const
    {
        if (nc < 1)
            throw ConfigError("ofdm.nc: must be >= 1");
        if (ns < 1)
            throw ConfigError("ofdm.ns: must be >= 1");
        if (!(delta_f > 0.0))
            throw ConfigError("ofdm.delta_f: must be positive");
        if (!(fc > 0.0))
            throw ConfigError("ofdm.fc: must be positive");
        if (!(cp_ratio >= 0.0))
            throw ConfigError("ofdm.cp_ratio: must be >= 0");
        if (bandwidth() > bandwidth_budget)
            throw ConfigError("ofdm.nc: bandwidth nc * delta_f exceeds the budget");
        const double fd = max_doppler(nu_max, c);
        if (fd > delta_f)
            throw ConfigError("ofdm.delta_f: maximum Doppler " + std::to_string(fd) +
                              " Hz exceeds the subcarrier spacing " + std::to_string(delta_f) + " Hz");
    }

    SubcarrierPrecoder mrt_precoder(const ChannelEstimate &estimate)
    {
        if (!(estimate.mean_sq_norm > 0.0))
            throw ConfigError("mrt_precoder: channel estimate has zero normalization");
        const double scale = 1.0 / std::sqrt(estimate.mean_sq_norm);
        SubcarrierPrecoder w;
        w.reserve(estimate.h_hat.size());
        for (const CVector &h : estimate.h_hat)
            w.push_back(h.conjugate() * scale);
        return w;
    }

    CVector sensing_beamformer(const APNode &tap, const Position3 &cell)
    {
        return steering_vector(angles_to(tap.position, cell), tap.n_antennas, tap.array);
    }

    double PowerAllocation::total() const
    {
        return std::accumulate(mu.begin(), mu.end(), 0.0) + std::accumulate(eta.begin(), eta.end(), 0.0);
    }

    PowerAllocation allocate_power_uniform(int n_ues, int n_regions, double power_w)
    {
        if (n_ues < 0 || n_regions < 0)
            throw ConfigError("allocate_power_uniform: negative stream count");
        PowerAllocation p;
        const int streams = n_ues + n_regions;
        const double share = streams > 0 ? power_w / streams : 0.0;
        p.mu.assign(n_ues, share);
        p.eta.assign(n_regions, share);
        return p;
    }

    CMatrix qpsk_symbols(int nc, int ns, Rng &rng)
    {
        std::uniform_int_distribution<int> bits(0, 3);
        const double r = 1.0 / std::sqrt(2.0);
        CMatrix x(nc, ns);
        for (Eigen::Index j = 0; j < x.size(); ++j)
        {
            const int b = bits(rng);
            x(j) = {(b & 1) ? -r : r, (b & 2) ? -r : r};
        }
        return x;
    }

    TxFrame transmit_frame(const std::vector<SubcarrierPrecoder> &comm_precoders,
                           const std::vector<CVector> &sensing_beams,
                           const PowerAllocation &allocation,
                           const std::vector<CMatrix> &ue_symbols,
                           const CMatrix &sensing_symbols,
                           const OFDMGrid &grid, int n_antennas)
    {
        if (comm_precoders.size() != allocation.mu.size() || ue_symbols.size() != allocation.mu.size())
            throw ConfigError("transmit_frame: UE precoders, symbols and mu must align");
        if (sensing_beams.size() != allocation.eta.size())
            throw ConfigError("transmit_frame: sensing beams and eta must align");
        auto grid_shaped = [&](const CMatrix &x)
        { return x.rows() == grid.nc && x.cols() == grid.ns; };
        for (const CMatrix &x : ue_symbols)
            if (!grid_shaped(x))
                throw ConfigError("transmit_frame: UE symbol block is not Nc x Ns");
        if (!sensing_beams.empty() && !grid_shaped(sensing_symbols))
            throw ConfigError("transmit_frame: sensing symbol block is not Nc x Ns");
        for (const SubcarrierPrecoder &w : comm_precoders)
        {
            if (static_cast<int>(w.size()) != grid.nc)
                throw ConfigError("transmit_frame: precoder needs one vector per subcarrier");
            for (const CVector &v : w)
                if (v.size() != n_antennas)
                    throw ConfigError("transmit_frame: precoder length differs from N_a");
        }
        for (const CVector &b : sensing_beams)
            if (b.size() != n_antennas)
                throw ConfigError("transmit_frame: beamformer length differs from N_a");

        TxFrame f;
        f.nc = grid.nc;
        f.ns = grid.ns;
        f.s = CMatrix::Zero(n_antennas, grid.resource_elements());

        // Sensing streams share x_0, so their beams combine into one vector.
        CVector beam = CVector::Zero(n_antennas);
        for (std::size_t i = 0; i < sensing_beams.size(); ++i)
            beam += std::sqrt(allocation.eta[i]) * sensing_beams[i];

        for (int ns = 0; ns < grid.ns; ++ns)
            for (int n = 0; n < grid.nc; ++n)
            {
                auto col = f.s.col(n + grid.nc * ns);
                for (std::size_t k = 0; k < comm_precoders.size(); ++k)
                    col += std::sqrt(allocation.mu[k]) * ue_symbols[k](n, ns) * comm_precoders[k][n];
                if (!sensing_beams.empty())
                    col += sensing_symbols(n, ns) * beam;
            }
        return f;
    }

    FrameSet assemble_frames(const Network &net, const OFDMGrid &grid, const WaveformOptions &opts,
                             double noise_var, std::uint64_t seed)
    {
        Rng uplink = make_rng(seed, Stream::uplink);
        Rng estimation = make_rng(seed, Stream::estimation);
        Rng symbols = make_rng(seed, Stream::symbols);

        std::vector<CMatrix> ue_symbols;
        for (std::size_t k = 0; k < net.ues.size(); ++k)
            ue_symbols.push_back(qpsk_symbols(grid.nc, grid.ns, symbols));

        FrameSet out;
        if (opts.coherent_sensing_stream)
            out.sensing_symbols.push_back(qpsk_symbols(grid.nc, grid.ns, symbols));
        else
            for (std::size_t t = 0; t < net.tx_ids.size(); ++t)
                out.sensing_symbols.push_back(qpsk_symbols(grid.nc, grid.ns, symbols));

        const int tau_p = opts.pilot_length > 0 ? opts.pilot_length : static_cast<int>(net.ues.size());
        for (std::size_t t = 0; t < net.tx_ids.size(); ++t)
        {
            const int m = net.tx_ids[t];
            const APNode &tap = net.aps[m];
            const auto &served_ues = net.assoc.tap_ues[m];
            const auto &served_regions = net.assoc.tap_regions[m];

            std::vector<SubcarrierPrecoder> precoders;
            std::vector<CMatrix> symbols_k;
            for (int k : served_ues)
            {
                const UplinkChannel h = ue_ap_channel(net, k, m, grid, uplink);
                const ChannelEstimate est =
                    opts.perfect_csi
                        ? perfect_estimate(h)
                        : estimate_channel(h, pilot_snr(tau_p, net.cfg.ap_power_w, h.beta, noise_var), estimation);
                precoders.push_back(mrt_precoder(est));
                symbols_k.push_back(ue_symbols[k]);
            }
            std::vector<CVector> beams;
            for (int i : served_regions)
                beams.push_back(sensing_beamformer(tap, net.inspected[i]));

            PowerAllocation alloc = allocate_power_uniform(static_cast<int>(served_ues.size()),
                                                           static_cast<int>(served_regions.size()),
                                                           net.cfg.ap_power_w);
            const CMatrix &x0 = out.sensing_symbols[opts.coherent_sensing_stream ? 0 : t];
            out.frames.push_back(transmit_frame(precoders, beams, alloc, symbols_k, x0, grid, tap.n_antennas));
            out.allocations.push_back(std::move(alloc));
        }
        return out;
    }
}
