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

#include "cfisac/waveform.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cfisac
{
    /// Row index of resource element (antenna, subcarrier, symbol) in a stacked vector.
    /// Antenna runs fastest, then subcarrier, then symbol.
    inline Eigen::Index stack_row(int antenna, int n, int n_sym, int na, int nc)
    {
        return antenna + static_cast<Eigen::Index>(na) * (n + static_cast<Eigen::Index>(nc) * n_sym);
    }

    /// Per-subcarrier thermal noise variance N_0 * delta_f * F, in watts.
    double noise_variance(double noise_psd_dbm_hz, double noise_figure_db, double delta_f);

    struct ObservationStack
    {
        CVector y; // N_a Nc Ns
        double noise_var = 0;
    };

    struct DopplerResponseStack
    {
        CMatrix D; // (N_a Nc Ns) x |M^tx|
        Velocity3 v;
    };

    // ---- Observation synthesis ---------------------------------------------------

    /// Raw rAP observation (target echo + direct links + noise) followed by cancellation of
    /// the known direct-link term. `echoes` and `direct` are aligned with `frames`.
    ObservationStack synthesize_observation(const std::vector<TxFrame> &frames,
                                            const std::vector<SensingChannelFactors> &echoes,
                                            const std::vector<DirectChannel> &direct,
                                            bool target_present, double noise_var, Rng &rng);

    // ---- Response model -----------------------------------------------------------

    /// Velocity-independent part of the spatial-Doppler response of one inspected cell.
    ///
    /// For each rAP r of the cell and each tAP t the column
    ///     base_r(:, t) = sqrt(beta) A s_t(n, n') rho(n)
    /// is precomputed once; a velocity candidate only contributes the Doppler phase ramp
    /// xi_{r,t}(n') = exp(j 2 pi n' (g_{r,t} . v) T_s) applied per symbol. Per-symbol Gram
    /// blocks are cached so that an objective evaluation never touches the full stack.
    class ResponseModel
    {
    public:
        ResponseModel(const Network &net, const FrameSet &frames, const OFDMGrid &grid, const Position3 &cell,
                      const std::vector<int> &rap_ids, DelayConvention convention = DelayConvention::pair);

        int n_rx() const { return static_cast<int>(base_.size()); }
        int n_tx() const { return n_tx_; }
        Eigen::Index rows() const { return rows_; }
        const OFDMGrid &grid() const { return grid_; }
        const std::vector<int> &rap_ids() const { return rap_ids_; }

        const CMatrix &base(int r) const { return base_[r]; }

        /// g with f_d = g . v for the (rAP r, tAP t) pair.
        const Eigen::Vector3d &doppler_gradient(int r, int t) const { return gradient_[r][t]; }

        /// Sum over subcarriers and antennas of base^H base restricted to symbol n'.
        const std::vector<CMatrix> &symbol_gram(int r) const { return symbol_gram_[r]; }

        /// Doppler phases xi_{r,t}(n') for every tAP, as an n_tx x Ns matrix.
        CMatrix doppler_phases(int r, const Velocity3 &v) const;

        /// Fills `out` (n_tx x Ns) without allocating.
        void doppler_phases(int r, const Velocity3 &v, CMatrix &out) const;

        DopplerResponseStack stack(int r, const Velocity3 &v) const;

    private:
        OFDMGrid grid_;
        std::vector<int> rap_ids_;
        int n_tx_ = 0;
        Eigen::Index rows_ = 0;
        std::vector<CMatrix> base_;
        std::vector<std::vector<Eigen::Vector3d>> gradient_;
        std::vector<std::vector<CMatrix>> symbol_gram_;
    };

    DopplerResponseStack build_response_stack(const ResponseModel &model, int r, const Velocity3 &v);

    // ---- Projection, ML estimate and GLRT --------------------------------------------

    inline constexpr double rank_tolerance = 1e-9;
    inline constexpr double cholesky_condition_limit = 1e8;

    struct Projection
    {
        double energy = 0; // ||D D^+ y||^2
        CVector alpha;     // D^+ y
        int rank = 0;
        bool used_svd = false;
    };

    /// Orthogonal projection of y onto col(D): Gram-matrix Cholesky when well conditioned,
    /// truncated SVD otherwise. Throws RankDeficient for an all-zero D.
    Projection project(const CMatrix &D, const CVector &y);

    /// Numerical rank of D from its singular values, relative threshold rank_tolerance.
    int numerical_rank(const CMatrix &D);

    /// alpha_hat = (D^H D)^{-1} D^H y with pseudo-inverse fallback.
    CVector ml_rcs_estimate(const DopplerResponseStack &stack, const ObservationStack &obs);

    /// Sum over rAPs of ||D_m D_m^+ y_m||^2.
    double glrt_statistic(std::span<const ObservationStack> observations,
                          std::span<const DopplerResponseStack> stacks);

    /// Fast velocity objective over a ResponseModel and fixed observations.
    ///
    /// Evaluations reuse internal scratch buffers; one instance must not be shared between
    /// threads. Copies are independent.
    class GlrtObjective
    {
    public:
        GlrtObjective(const ResponseModel &model, std::span<const ObservationStack> observations);

        double operator()(const Velocity3 &v) const;

        /// Same value through fully materialized stacks; reference path for tests.
        double reference(const Velocity3 &v) const;

        std::size_t evaluations() const { return evaluations_; }
        void reset_count() { evaluations_ = 0; }

        const ResponseModel &model() const { return *model_; }
        std::span<const ObservationStack> observations() const { return observations_; }

    private:
        double rap_energy(int r, const Velocity3 &v) const;

        const ResponseModel *model_;
        std::vector<ObservationStack> observations_;
        std::vector<CMatrix> projected_; // n_tx x Ns per rAP: sum over symbol rows of base^H y
        mutable std::size_t evaluations_ = 0;
        mutable CMatrix phases_, gram_, outer_;
        mutable CVector rhs_;
        mutable Eigen::LLT<CMatrix> llt_;
    };

    // ---- Thresholds ------------------------------------------------------------------

    enum class ThresholdMode
    {
        analytic,
        monte_carlo
    };

    /// Threshold on the summed projection energy under H0 ~ Gamma(r_tot, sigma^2):
    /// sigma^2 * Q^{-1}(r_tot, p_fa). Throws ConfigError unless 0 < p_fa < 1.
    double gamma_threshold(int total_rank, double noise_var, double p_fa);

    /// Empirical (1 - p_fa) quantile: the smallest sample whose exceedance fraction is <= p_fa.
    double empirical_threshold(std::vector<double> h0_samples, double p_fa);

    /// Draws `trials` H0 statistics from `sampler(trial_index)` in monte_carlo mode.
    double calibrate_threshold(ThresholdMode mode, int total_rank, double noise_var, double p_fa,
                               const std::function<double(std::size_t)> &h0_sampler = {},
                               std::size_t trials = 20000);

    // ---- Detection -------------------------------------------------------------------

    struct DetectionOutcome
    {
        double statistic = 0;
        double threshold = 0;
        bool target_detected = false;
        std::vector<CVector> alpha_hat; // per rAP
        Velocity3 v_hat;
        std::size_t evaluations = 0;
        bool estimator_failed = false;
    };

    /// Returns the velocity maximizing the objective. Exceptions are treated as failure.
    using VelocitySearch = std::function<Velocity3(const GlrtObjective &)>;

    DetectionOutcome glrt_detect(const GlrtObjective &objective, const VelocitySearch &search, double threshold);

    // ---- Sensing SNR -------------------------------------------------------------------

    struct SNRReport
    {
        double gamma = 0;
        double gamma_db = 0;
        std::vector<int> ranks;
    };

    /// sum_m tr(D_m R_m D_m^H) / (sigma^2 sum_m rank(D_m)).
    SNRReport sensing_snr(std::span<const DopplerResponseStack> stacks, std::span<const RMatrix> rcs_cov,
                          double noise_var);

    /// Signal energy captured by projectors built at an assumed velocity:
    /// sum_m tr(P_m D_m^true R_m D_m^true^H P_m) / (sigma^2 sum_m rank(D_m^assumed)).
    SNRReport realized_snr(std::span<const DopplerResponseStack> true_stacks,
                           std::span<const DopplerResponseStack> assumed_stacks,
                           std::span<const RMatrix> rcs_cov, double noise_var);

    double to_db(double linear);
}
