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

#include "cfisac/channel.hpp"

#include <cmath>

namespace cfisac
{
    double cell_reference_delay(const Network &net, const Position3 &cell)
    {
        double sum = 0.0;
        int count = 0;
        for (int r : net.rx_ids)
            for (int t : net.tx_ids)
            {
                sum += bistatic_delay(cell, net.aps[t].position, net.aps[r].position, net.consts);
                ++count;
            }
        return count > 0 ? sum / count : 0.0;
    }

    CVector delay_phases(double delay, const OFDMGrid &grid)
    {
        CVector rho(grid.nc);
        const double step = -2.0 * pi * delay / grid.useful_duration();
        for (int n = 0; n < grid.nc; ++n)
            rho(n) = std::polar(1.0, step * n);
        return rho;
    }

    CVector doppler_phases(double doppler, const OFDMGrid &grid)
    {
        CVector xi(grid.ns);
        const double step = 2.0 * pi * doppler * grid.symbol_duration();
        for (int n = 0; n < grid.ns; ++n)
            xi(n) = std::polar(1.0, step * n);
        return xi;
    }

    SensingChannelFactors sensing_channel(const Network &net, const Position3 &cell, const Velocity3 &v,
                                          int rap, int tap, cplx alpha, const OFDMGrid &grid,
                                          DelayConvention convention)
    {
        const APNode &rx = net.aps.at(rap);
        const APNode &tx = net.aps.at(tap);

        SensingChannelFactors f;
        f.beta = bistatic_gain(cell, tx.position, rx.position, net.consts);
        f.gain = alpha * std::sqrt(f.beta);
        const CVector a_rx = steering_vector(angles_to(rx.position, cell), rx.n_antennas, rx.array);
        const CVector a_tx = steering_vector(angles_to(tx.position, cell), tx.n_antennas, tx.array);
        f.A = a_rx * a_tx.adjoint();
        f.delay = convention == DelayConvention::pair
                      ? bistatic_delay(cell, tx.position, rx.position, net.consts)
                      : cell_reference_delay(net, cell);
        f.doppler = bistatic_doppler(cell, v, tx.position, rx.position, net.consts);
        f.rho = delay_phases(f.delay, grid);
        f.xi = doppler_phases(f.doppler, grid);
        return f;
    }

    DirectChannel direct_ap_channel(double beta, double k_factor, const CMatrix &los_response,
                                    int nc, Rng &rng)
    {
        DirectChannel g;
        g.kappa = std::sqrt(beta / (1.0 + k_factor));
        g.V = los_response;
        g.los.resize(nc);
        g.nlos.reserve(nc);
        const double amp = std::sqrt(k_factor);
        for (int n = 0; n < nc; ++n)
        {
            CMatrix gb(los_response.rows(), los_response.cols());
            for (Eigen::Index j = 0; j < gb.size(); ++j)
                gb(j) = complex_normal(rng);
            g.nlos.push_back(std::move(gb));
            g.los(n) = std::polar(amp, uniform(rng, 0.0, 2.0 * pi));
        }
        return g;
    }

    DirectChannel direct_ap_channel(const Network &net, int rap, int tap, const OFDMGrid &grid, Rng &rng)
    {
        if (rap == tap)
            throw ConfigError("direct_ap_channel: rAP and tAP must differ");
        const APNode &rx = net.aps.at(rap);
        const APNode &tx = net.aps.at(tap);
        const CVector a_rx = steering_vector(angles_to(rx.position, tx.position), rx.n_antennas, rx.array);
        const CVector a_tx = steering_vector(angles_to(tx.position, rx.position), tx.n_antennas, tx.array);
        return direct_ap_channel(net.lsf.ap_ap(rap, tap), net.lsf.ap_ap_k(rap, tap),
                                 a_rx * a_tx.adjoint(), grid.nc, rng);
    }

    UplinkChannel ue_ap_channel(double beta, double k_factor, const CVector &los_steering, int nc, Rng &rng)
    {
        UplinkChannel u;
        u.beta = beta;
        u.k_factor = k_factor;
        u.los_steering = los_steering;
        const double scale = std::sqrt(beta / (k_factor + 1.0));
        const double amp = std::sqrt(k_factor);
        for (int n = 0; n < nc; ++n)
        {
            const cplx los = std::polar(amp, uniform(rng, 0.0, 2.0 * pi));
            CVector h(los_steering.size());
            for (Eigen::Index a = 0; a < h.size(); ++a)
                h(a) = scale * (los * los_steering(a) + complex_normal(rng));
            u.h.push_back(std::move(h));
        }
        return u;
    }

    UplinkChannel ue_ap_channel(const Network &net, int ue, int ap, const OFDMGrid &grid, Rng &rng)
    {
        const APNode &node = net.aps.at(ap);
        const CVector a = steering_vector(angles_to(node.position, net.ues.at(ue).position),
                                          node.n_antennas, node.array);
        return ue_ap_channel(net.lsf.ue_ap(ue, ap), net.lsf.ue_ap_k(ue, ap), a, grid.nc, rng);
    }

    ChannelEstimate estimate_channel(const UplinkChannel &h_true, double pilot_snr_linear, Rng &rng)
    {
        if (!(pilot_snr_linear > 0.0))
            throw ConfigError("estimate_channel: pilot SNR must be positive");
        const double shrink = std::isinf(pilot_snr_linear) ? 1.0 : pilot_snr_linear / (1.0 + pilot_snr_linear);
        const double err_var = h_true.beta / pilot_snr_linear;

        ChannelEstimate est;
        for (const CVector &h : h_true.h)
        {
            CVector e(h.size());
            for (Eigen::Index a = 0; a < e.size(); ++a)
                e(a) = complex_normal(rng, err_var);
            est.h_hat.push_back(shrink * (h + e));
        }
        const auto na = h_true.los_steering.size();
        est.mean_sq_norm = shrink * h_true.beta * static_cast<double>(na);
        return est;
    }

    ChannelEstimate perfect_estimate(const UplinkChannel &h_true)
    {
        ChannelEstimate est;
        est.h_hat = h_true.h;
        est.mean_sq_norm = h_true.beta * static_cast<double>(h_true.los_steering.size());
        return est;
    }

    double pilot_snr(int pilot_length, double power_w, double beta, double noise_var)
    {
        return pilot_length * power_w * beta / noise_var;
    }
}
