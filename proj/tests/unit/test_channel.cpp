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

// Channel: sensing channel factors, direct Rician links, uplink channels and estimates.

#include "cfisac/channel.hpp"
#include "support.hpp"

using namespace cfisac;
using namespace testing;
using Catch::Approx;

namespace
{
    Network default_network(std::uint64_t seed)
    {
        return build_network(ScenarioConfig{}, PhysicalConstants::at(3e9), seed);
    }
}

TEST_CASE("sensing channel phases and norm", "[channel]")
{
    const Network net = default_network(1);
    const OFDMGrid grid;
    const Position3 cell = net.target.position;
    const int rap = net.rx_ids[0], tap = net.tx_ids[0];
    const cplx alpha(1.3, -0.4);

    const SensingChannelFactors still = sensing_channel(net, cell, {}, rap, tap, alpha, grid);
    for (int n = 0; n < grid.ns; ++n)
        CHECK(std::abs(still.xi(n) - cplx(1, 0)) < 1e-15);

    const SensingChannelFactors h = sensing_channel(net, cell, {40, -20, 10}, rap, tap, alpha, grid);
    CHECK(std::abs(h.rho(0) - cplx(1, 0)) < 1e-15);
    const double beta = bistatic_gain(cell, net.aps[tap].position, net.aps[rap].position, net.consts);
    CHECK(h.beta == Approx(beta));
    CHECK(std::abs(h.gain - alpha * std::sqrt(beta)) < 1e-12 * std::abs(h.gain));
    CHECK(h.doppler == Approx(bistatic_doppler(cell, {40, -20, 10}, net.aps[tap].position, net.aps[rap].position,
                                               net.consts)));
    for (int n = 0; n < grid.nc; ++n)
        for (int s = 0; s < grid.ns; ++s)
        {
            CHECK(std::abs(h.rho(n)) == Approx(1.0));
            CHECK(std::abs(h.xi(s)) == Approx(1.0));
            CHECK(h.at(n, s).norm() == Approx(std::abs(h.gain) * 4.0));
        }
    Eigen::JacobiSVD<CMatrix> svd(h.A);
    CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));

    // Delay and Doppler phase definitions.
    const CVector rho = delay_phases(1e-6, grid);
    const CVector xi = doppler_phases(500.0, grid);
    for (int n = 0; n < grid.nc; ++n)
        CHECK(std::abs(rho(n) - std::polar(1.0, -2 * pi * n * 1e-6 * grid.delta_f)) < 1e-12);
    for (int s = 0; s < grid.ns; ++s)
        CHECK(std::abs(xi(s) - std::polar(1.0, 2 * pi * s * 500.0 * grid.symbol_duration())) < 1e-12);
}

TEST_CASE("Doppler signatures one resolution cell apart are orthogonal", "[channel]")
{
    const OFDMGrid grid;
    const double res = 1.0 / (grid.ns * grid.symbol_duration());
    for (double f0 : {0.0, 137.0, -900.0})
    {
        const CVector a = doppler_phases(f0, grid);
        const CVector b = doppler_phases(f0 + res, grid);
        CHECK(std::abs(a.dot(b)) <= 1e-10 * grid.ns);
    }
}

TEST_CASE("RCS-weighted gain energy", "[channel]")
{
    const Network net = default_network(2);
    const OFDMGrid grid;
    const std::vector<Position3> taps = net.tap_positions();
    const RMatrix R = rcs_covariance(net.target.position, taps, 10.0, 0.5);
    const int rap = net.rx_ids[1];
    Rng rng(3);
    double acc = 0, beta = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
    {
        const CVector alpha = draw_rcs(R, rng);
        const SensingChannelFactors h = sensing_channel(net, net.target.position, {}, rap, net.tx_ids[2], alpha(2), grid);
        acc += std::norm(h.gain);
        beta = h.beta;
    }
    CHECK(acc / n == Approx(10.0 * beta).epsilon(0.05));
}

TEST_CASE("direct AP-AP channel", "[channel]")
{
    const int na = 4;
    const CMatrix V = CMatrix::Ones(na, na);
    Rng rng(4);

    // Pure scattering: E||G||_F^2 = beta Na^2.
    double acc = 0;
    const int n = 10000;
    CMatrix cov = CMatrix::Zero(na * na, na * na);
    for (int i = 0; i < n; ++i)
    {
        const DirectChannel g = direct_ap_channel(2e-9, 0.0, V, 1, rng);
        acc += g.at(0).squaredNorm();
        const Eigen::Map<const CVector> v(g.nlos[0].data(), na * na);
        cov += v * v.adjoint();
    }
    CHECK(acc / n == Approx(2e-9 * na * na).epsilon(0.05));
    cov /= n;
    const CMatrix Q = CMatrix::Identity(na * na, na * na);
    CHECK((cov - Q).norm() / Q.norm() < 0.05);

    // Strong LoS: G / (kappa sqrt K) approaches a unit phase times V.
    const DirectChannel los = direct_ap_channel(1e-9, 1e8, V, 3, rng);
    for (int sc = 0; sc < 3; ++sc)
    {
        const CMatrix ratio = los.at(sc) / (los.kappa * std::sqrt(1e8));
        const cplx phase = ratio(0, 0);
        CHECK(std::abs(phase) == Approx(1.0).epsilon(1e-3));
        CHECK((ratio - phase * V).norm() < 1e-2);
    }
    CHECK(los.kappa == Approx(std::sqrt(1e-9 / (1.0 + 1e8))));

    const Network net = default_network(5);
    CHECK_THROWS_AS(direct_ap_channel(net, net.rx_ids[0], net.rx_ids[0], OFDMGrid{}, rng), ConfigError);
}

TEST_CASE("uplink channel moments", "[channel]")
{
    const int na = 4;
    const CVector los = steering_vector({0.3, 1.1}, na);
    Rng rng(6);
    const int n = 10000;
    double acc = 0, acc_scaled = 0;
    for (int i = 0; i < n; ++i)
    {
        acc += ue_ap_channel(3e-10, 0.0, los, 1, rng).h[0].squaredNorm();
        acc_scaled += ue_ap_channel(6e-10, 0.0, los, 1, rng).h[0].squaredNorm();
    }
    CHECK(acc / n == Approx(3e-10 * na).epsilon(0.05));
    CHECK(acc_scaled / acc == Approx(2.0).epsilon(0.05));

    // Rician split K:1 between the coherent LoS part and the scattered residual.
    const double K = 3.0;
    double los_power = 0, nlos_power = 0;
    for (int i = 0; i < n; ++i)
    {
        const UplinkChannel h = ue_ap_channel(1.0, K, los, 1, rng);
        const cplx proj = los.dot(h.h[0]) / static_cast<double>(na);
        const CVector scattered = h.h[0] - proj * los;
        los_power += std::norm(proj) * na;
        nlos_power += scattered.squaredNorm();
    }
    // The scattered part has one of its Na dimensions along the LoS direction.
    const double los_expected = K / (1 + K) * na + 1.0 / (1 + K);
    const double nlos_expected = (na - 1.0) / (1 + K);
    CHECK(los_power / n == Approx(los_expected).epsilon(0.05));
    CHECK(nlos_power / n == Approx(nlos_expected).epsilon(0.05));
}

TEST_CASE("channel estimate proxy", "[channel]")
{
    const int na = 4;
    const CVector los = steering_vector({0.0, 0.7}, na);
    Rng rng(7);
    const UplinkChannel h = ue_ap_channel(1e-9, 2.0, los, 3, rng);

    const ChannelEstimate exact = estimate_channel(h, std::numeric_limits<double>::infinity(), rng);
    for (int n = 0; n < 3; ++n)
        CHECK((exact.h_hat[n] - h.h[n]).norm() < 1e-20);
    const ChannelEstimate near_exact = estimate_channel(h, 1e12, rng);
    CHECK((near_exact.h_hat[0] - h.h[0]).norm() < 1e-5 * h.h[0].norm());
    const ChannelEstimate hopeless = estimate_channel(h, 1e-12, rng);
    CHECK(hopeless.h_hat[0].norm() < 1e-5 * h.h[0].norm());

    const double snr = 2.5;
    double acc = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
    {
        const UplinkChannel hi = ue_ap_channel(1e-9, 2.0, los, 1, rng);
        acc += estimate_channel(hi, snr, rng).h_hat[0].squaredNorm();
    }
    const ChannelEstimate e = estimate_channel(h, snr, rng);
    CHECK(e.mean_sq_norm == Approx(snr / (1 + snr) * 1e-9 * na));
    CHECK(acc / n == Approx(e.mean_sq_norm).epsilon(0.03));

    CHECK(perfect_estimate(h).mean_sq_norm == Approx(1e-9 * na));
    CHECK(pilot_snr(8, 2.0, 1e-10, 1e-15) == Approx(8 * 2.0 * 1e-10 / 1e-15));
}
