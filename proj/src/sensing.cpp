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

#include "cfisac/sensing.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

namespace cfisac
{
    double noise_variance(double noise_psd_dbm_hz, double noise_figure_db, double delta_f)
    {
        return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0) * delta_f * std::pow(10.0, noise_figure_db / 10.0);
    }

    double to_db(double linear)
    {
        return 10.0 * std::log10(linear);
    }

    ObservationStack synthesize_observation(const std::vector<TxFrame> &frames,
                                            const std::vector<SensingChannelFactors> &echoes,
                                            const std::vector<DirectChannel> &direct,
                                            bool target_present, double noise_var, Rng &rng)
    {
        if (frames.empty() || echoes.size() != frames.size() || direct.size() != frames.size())
            throw ConfigError("synthesize_observation: frames, echoes and direct links must align");
        if (noise_var < 0.0)
            throw ConfigError("synthesize_observation: negative noise variance");

        const int nc = frames.front().nc;
        const int ns = frames.front().ns;
        const auto na = static_cast<int>(echoes.front().A.rows());

        ObservationStack obs;
        obs.noise_var = noise_var;
        obs.y.resize(static_cast<Eigen::Index>(na) * nc * ns);

        const Eigen::Index cols = static_cast<Eigen::Index>(nc) * ns;
        CMatrix echo = CMatrix::Zero(na, cols);
        CMatrix leak = CMatrix::Zero(na, cols);
        for (std::size_t t = 0; t < frames.size(); ++t)
        {
            const TxFrame &f = frames[t];
            for (int n = 0; n < nc; ++n)
            {
                const CMatrix g = direct[t].at(n);
                for (int n_sym = 0; n_sym < ns; ++n_sym)
                    leak.col(n + nc * n_sym).noalias() += g * f.at(n, n_sym);
            }
            if (!target_present)
                continue;
            const SensingChannelFactors &h = echoes[t];
            const CMatrix as = h.A * f.s;
            for (int n_sym = 0; n_sym < ns; ++n_sym)
                for (int n = 0; n < nc; ++n)
                    echo.col(n + nc * n_sym) += (h.gain * h.rho(n) * h.xi(n_sym)) * as.col(n + nc * n_sym);
        }

        CVector raw(na);
        for (int n_sym = 0; n_sym < ns; ++n_sym)
            for (int n = 0; n < nc; ++n)
            {
                const Eigen::Index k = n + static_cast<Eigen::Index>(nc) * n_sym;
                raw = echo.col(k) + leak.col(k);
                if (noise_var > 0.0)
                    for (int a = 0; a < na; ++a)
                        raw(a) += complex_normal(rng, noise_var);
                // Direct links and waveforms are known at the CPU and cancelled exactly.
                obs.y.segment(stack_row(0, n, n_sym, na, nc), na) = raw - leak.col(k);
            }
        return obs;
    }

    // ---- ResponseModel ------------------------------------------------------------

    ResponseModel::ResponseModel(const Network &net, const FrameSet &frames, const OFDMGrid &grid,
                                 const Position3 &cell, const std::vector<int> &rap_ids,
                                 DelayConvention convention)
        : grid_(grid), rap_ids_(rap_ids), n_tx_(static_cast<int>(net.tx_ids.size()))
    {
        if (frames.frames.size() != net.tx_ids.size())
            throw ConfigError("ResponseModel: one frame per tAP required");
        if (rap_ids.empty())
            throw ConfigError("ResponseModel: no rAPs inspect the cell");

        const int nc = grid.nc;
        const int ns = grid.ns;
        const double ref_delay = convention == DelayConvention::per_cell ? cell_reference_delay(net, cell) : 0.0;

        for (int rap : rap_ids)
        {
            const APNode &rx = net.aps.at(rap);
            const int na = rx.n_antennas;
            rows_ = static_cast<Eigen::Index>(na) * nc * ns;
            const CVector a_rx = steering_vector(angles_to(rx.position, cell), na, rx.array);

            CMatrix base(rows_, n_tx_);
            std::vector<Eigen::Vector3d> grads;
            for (int t = 0; t < n_tx_; ++t)
            {
                const APNode &tx = net.aps[net.tx_ids[t]];
                bistatic_angles(cell, {}, tx.position, rx.position); // geometry check
                grads.push_back(cfisac::doppler_gradient(cell, tx.position, rx.position, net.consts));

                const double amp = std::sqrt(bistatic_gain(cell, tx.position, rx.position, net.consts));
                const CVector a_tx = steering_vector(angles_to(tx.position, cell), tx.n_antennas, tx.array);
                const double delay = convention == DelayConvention::pair
                                         ? bistatic_delay(cell, tx.position, rx.position, net.consts)
                                         : ref_delay;
                const CVector rho = delay_phases(delay, grid);
                const TxFrame &frame = frames.frames[t];
                for (int n_sym = 0; n_sym < ns; ++n_sym)
                    for (int n = 0; n < nc; ++n)
                    {
                        const cplx q = amp * a_tx.dot(frame.at(n, n_sym)) * rho(n); // a_tx^H s
                        base.col(t).segment(stack_row(0, n, n_sym, na, nc), na) = q * a_rx;
                    }
            }

            const Eigen::Index block = static_cast<Eigen::Index>(na) * nc;
            std::vector<CMatrix> grams;
            for (int n_sym = 0; n_sym < ns; ++n_sym)
            {
                const auto rows = base.middleRows(block * n_sym, block);
                grams.push_back(rows.adjoint() * rows);
            }

            base_.push_back(std::move(base));
            gradient_.push_back(std::move(grads));
            symbol_gram_.push_back(std::move(grams));
        }
    }

    void ResponseModel::doppler_phases(int r, const Velocity3 &v, CMatrix &out) const
    {
        out.resize(n_tx_, grid_.ns);
        const double ts = grid_.symbol_duration();
        const Eigen::Vector3d vel = v.vec();
        for (int t = 0; t < n_tx_; ++t)
        {
            const cplx step = std::polar(1.0, 2.0 * pi * gradient_[r][t].dot(vel) * ts);
            cplx ph = 1.0;
            for (int n = 0; n < grid_.ns; ++n)
            {
                out(t, n) = ph;
                ph *= step;
            }
        }
    }

    CMatrix ResponseModel::doppler_phases(int r, const Velocity3 &v) const
    {
        CMatrix out;
        doppler_phases(r, v, out);
        return out;
    }

    DopplerResponseStack ResponseModel::stack(int r, const Velocity3 &v) const
    {
        DopplerResponseStack s;
        s.v = v;
        s.D = base_[r];
        const Eigen::Index block = rows_ / grid_.ns;
        const double ts = grid_.symbol_duration();
        for (int t = 0; t < n_tx_; ++t)
        {
            const double fd = gradient_[r][t].dot(v.vec());
            for (int n_sym = 0; n_sym < grid_.ns; ++n_sym)
                s.D.col(t).segment(block * n_sym, block) *= std::polar(1.0, 2.0 * pi * n_sym * fd * ts);
        }
        return s;
    }

    DopplerResponseStack build_response_stack(const ResponseModel &model, int r, const Velocity3 &v)
    {
        return model.stack(r, v);
    }

    // ---- Projection ---------------------------------------------------------------

    namespace
    {
        Projection project_svd(const CMatrix &D, const CVector &y)
        {
            Eigen::JacobiSVD<CMatrix> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const RVector &s = svd.singularValues();
            Projection p;
            p.used_svd = true;
            if (s.size() == 0 || !(s(0) > 0.0))
                throw RankDeficient("response matrix is identically zero");
            const double tol = rank_tolerance * s(0);
            p.rank = static_cast<int>((s.array() > tol).count());
            const CVector coeff = svd.matrixU().leftCols(p.rank).adjoint() * y;
            p.energy = coeff.squaredNorm();
            p.alpha = svd.matrixV().leftCols(p.rank) *
                      (coeff.array() / s.head(p.rank).array().cast<cplx>()).matrix();
            return p;
        }

        // Cholesky of a Hermitian Gram matrix with a cheap condition estimate.
        bool well_conditioned(const Eigen::LLT<CMatrix> &llt)
        {
            if (llt.info() != Eigen::Success)
                return false;
            const RVector d = llt.matrixLLT().diagonal().real();
            const double lo = d.minCoeff();
            if (!(lo > 0.0))
                return false;
            const double ratio = d.maxCoeff() / lo;
            return ratio * ratio < cholesky_condition_limit;
        }
    }

    Projection project(const CMatrix &D, const CVector &y)
    {
        if (D.rows() != y.size())
            throw ConfigError("project: response rows and observation length differ");
        if (D.cols() == 0 || D.squaredNorm() == 0.0)
            throw RankDeficient("response matrix is identically zero");

        const CMatrix gram = D.adjoint() * D;
        Eigen::LLT<CMatrix> llt(gram);
        if (!well_conditioned(llt))
            return project_svd(D, y);

        Projection p;
        const CVector b = D.adjoint() * y;
        p.alpha = llt.solve(b);
        p.energy = std::max(0.0, b.dot(p.alpha).real());
        p.rank = static_cast<int>(D.cols());
        return p;
    }

    int numerical_rank(const CMatrix &D)
    {
        if (D.size() == 0)
            return 0;
        Eigen::JacobiSVD<CMatrix> svd(D);
        const RVector &s = svd.singularValues();
        if (!(s(0) > 0.0))
            return 0;
        return static_cast<int>((s.array() > rank_tolerance * s(0)).count());
    }

    CVector ml_rcs_estimate(const DopplerResponseStack &stack, const ObservationStack &obs)
    {
        return project(stack.D, obs.y).alpha;
    }

    double glrt_statistic(std::span<const ObservationStack> observations,
                          std::span<const DopplerResponseStack> stacks)
    {
        if (observations.size() != stacks.size())
            throw ConfigError("glrt_statistic: observation and response lists must align");
        double sum = 0.0;
        for (std::size_t m = 0; m < stacks.size(); ++m)
            sum += project(stacks[m].D, observations[m].y).energy;
        return sum;
    }

    // ---- GlrtObjective --------------------------------------------------------------

    GlrtObjective::GlrtObjective(const ResponseModel &model, std::span<const ObservationStack> observations)
        : model_(&model), observations_(observations.begin(), observations.end())
    {
        if (static_cast<int>(observations_.size()) != model.n_rx())
            throw ConfigError("GlrtObjective: one observation per rAP required");
        const int ns = model.grid().ns;
        const Eigen::Index block = model.rows() / ns;
        for (int r = 0; r < model.n_rx(); ++r)
        {
            if (observations_[r].y.size() != model.rows())
                throw ConfigError("GlrtObjective: observation length differs from the response rows");
            CMatrix proj(model.n_tx(), ns);
            for (int n_sym = 0; n_sym < ns; ++n_sym)
                proj.col(n_sym) = model.base(r).middleRows(block * n_sym, block).adjoint() *
                                  observations_[r].y.segment(block * n_sym, block);
            projected_.push_back(std::move(proj));
        }
    }

    double GlrtObjective::rap_energy(int r, const Velocity3 &v) const
    {
        const ResponseModel &m = *model_;
        const auto &grams = m.symbol_gram(r);
        m.doppler_phases(r, v, phases_);

        // G = sum_n' diag(conj xi) C(n') diag(xi), b = sum_n' conj(xi) .* (B_n'^H y_n')
        gram_.setZero(m.n_tx(), m.n_tx());
        for (int n_sym = 0; n_sym < m.grid().ns; ++n_sym)
        {
            outer_.noalias() = phases_.col(n_sym).conjugate() * phases_.col(n_sym).transpose();
            gram_ += outer_.cwiseProduct(grams[n_sym]);
        }
        rhs_ = phases_.conjugate().cwiseProduct(projected_[r]).rowwise().sum();

        llt_.compute(gram_);
        if (!well_conditioned(llt_))
            return project(m.stack(r, v).D, observations_[r].y).energy;
        return llt_.matrixL().solve(rhs_).squaredNorm();
    }

    double GlrtObjective::operator()(const Velocity3 &v) const
    {
        ++evaluations_;
        double sum = 0.0;
        for (int r = 0; r < model_->n_rx(); ++r)
            sum += rap_energy(r, v);
        return sum;
    }

    double GlrtObjective::reference(const Velocity3 &v) const
    {
        std::vector<DopplerResponseStack> stacks;
        for (int r = 0; r < model_->n_rx(); ++r)
            stacks.push_back(model_->stack(r, v));
        return glrt_statistic(observations_, stacks);
    }

    // ---- Thresholds --------------------------------------------------------------------

    double gamma_threshold(int total_rank, double noise_var, double p_fa)
    {
        if (!(p_fa > 0.0 && p_fa < 1.0))
            throw ConfigError("detector.p_fa: must lie strictly between 0 and 1");
        if (total_rank < 1)
            throw RankDeficient("gamma_threshold: total rank must be >= 1");
        if (!(noise_var > 0.0))
            throw ConfigError("gamma_threshold: noise variance must be positive");
        return noise_var * boost::math::gamma_q_inv(static_cast<double>(total_rank), p_fa);
    }

    double empirical_threshold(std::vector<double> h0_samples, double p_fa)
    {
        if (!(p_fa > 0.0 && p_fa < 1.0))
            throw ConfigError("detector.p_fa: must lie strictly between 0 and 1");
        if (h0_samples.empty())
            throw ConfigError("empirical_threshold: no H0 samples");
        std::sort(h0_samples.begin(), h0_samples.end());
        const auto n = h0_samples.size();
        auto idx = static_cast<std::size_t>(std::ceil((1.0 - p_fa) * static_cast<double>(n)));
        idx = std::clamp<std::size_t>(idx, 1, n) - 1;
        return h0_samples[idx];
    }

    double calibrate_threshold(ThresholdMode mode, int total_rank, double noise_var, double p_fa,
                               const std::function<double(std::size_t)> &h0_sampler, std::size_t trials)
    {
        if (!(p_fa > 0.0 && p_fa < 1.0))
            throw ConfigError("detector.p_fa: must lie strictly between 0 and 1");
        if (mode == ThresholdMode::analytic)
            return gamma_threshold(total_rank, noise_var, p_fa);
        if (!h0_sampler || trials == 0)
            throw ConfigError("calibrate_threshold: monte_carlo mode needs an H0 sampler and trials");
        std::vector<double> samples(trials);
        for (std::size_t i = 0; i < trials; ++i)
            samples[i] = h0_sampler(i);
        return empirical_threshold(std::move(samples), p_fa);
    }

    // ---- Detection ------------------------------------------------------------------------

    DetectionOutcome glrt_detect(const GlrtObjective &objective, const VelocitySearch &search, double threshold)
    {
        DetectionOutcome out;
        out.threshold = threshold;
        const std::size_t before = objective.evaluations();
        try
        {
            out.v_hat = search(objective);
        }
        catch (const std::exception &)
        {
            out.v_hat = {};
            out.estimator_failed = true;
        }
        out.statistic = objective(out.v_hat);
        const double at_zero = objective(Velocity3{});
        if (at_zero > out.statistic)
        {
            out.statistic = at_zero;
            out.v_hat = {};
        }
        out.evaluations = objective.evaluations() - before;
        out.target_detected = out.statistic > threshold;

        const ResponseModel &model = objective.model();
        for (int r = 0; r < model.n_rx(); ++r)
            out.alpha_hat.push_back(project(model.stack(r, out.v_hat).D, objective.observations()[r].y).alpha);
        return out;
    }

    // ---- SNR -------------------------------------------------------------------------------

    SNRReport sensing_snr(std::span<const DopplerResponseStack> stacks, std::span<const RMatrix> rcs_cov,
                          double noise_var)
    {
        if (stacks.size() != rcs_cov.size())
            throw ConfigError("sensing_snr: stacks and covariances must align");
        if (!(noise_var > 0.0))
            throw ConfigError("sensing_snr: noise variance must be positive");

        SNRReport rep;
        double signal = 0.0;
        int rank_sum = 0;
        for (std::size_t m = 0; m < stacks.size(); ++m)
        {
            const CMatrix &D = stacks[m].D;
            // tr(D R D^H) = sum_ab R_ab (D^H D)_ba
            const CMatrix gram = D.adjoint() * D;
            signal += (rcs_cov[m].cast<cplx>().cwiseProduct(gram.transpose())).sum().real();
            rep.ranks.push_back(numerical_rank(D));
            rank_sum += rep.ranks.back();
        }
        if (rank_sum == 0)
            throw RankDeficient("sensing SNR: total rank is zero");
        rep.gamma = std::max(0.0, signal) / (noise_var * rank_sum);
        rep.gamma_db = to_db(rep.gamma);
        return rep;
    }

    SNRReport realized_snr(std::span<const DopplerResponseStack> true_stacks,
                           std::span<const DopplerResponseStack> assumed_stacks,
                           std::span<const RMatrix> rcs_cov, double noise_var)
    {
        if (true_stacks.size() != assumed_stacks.size() || true_stacks.size() != rcs_cov.size())
            throw ConfigError("realized_snr: stacks and covariances must align");
        if (!(noise_var > 0.0))
            throw ConfigError("realized_snr: noise variance must be positive");

        SNRReport rep;
        double signal = 0.0;
        int rank_sum = 0;
        for (std::size_t m = 0; m < true_stacks.size(); ++m)
        {
            const CMatrix &Dt = true_stacks[m].D;
            const CMatrix &Da = assumed_stacks[m].D;
            const CMatrix R = rcs_cov[m].cast<cplx>();
            int rank = 0;
            if (Da.size() > 0 && Da.squaredNorm() > 0.0)
            {
                Eigen::JacobiSVD<CMatrix> svd(Da, Eigen::ComputeThinU);
                const RVector &s = svd.singularValues();
                rank = static_cast<int>((s.array() > rank_tolerance * s(0)).count());
                // tr(P Dt R Dt^H P) = tr(X R X^H), X = U_r^H Dt
                const CMatrix X = svd.matrixU().leftCols(rank).adjoint() * Dt;
                signal += (X * R * X.adjoint()).trace().real();
            }
            rep.ranks.push_back(rank);
            rank_sum += rank;
        }
        if (rank_sum == 0)
            throw RankDeficient("sensing SNR: total rank is zero");
        rep.gamma = std::max(0.0, signal) / (noise_var * rank_sum);
        rep.gamma_db = to_db(rep.gamma);
        return rep;
    }
}
