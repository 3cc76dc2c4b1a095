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

#include "cfisac/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace cfisac
{
    namespace
    {
        constexpr std::uint64_t calibration_salt = 0xca11b2a7e5eedULL;

        std::uint64_t method_seed(std::uint64_t trial_seed, EstimatorMethod m)
        {
            return derive_seed(derive_seed(trial_seed, static_cast<std::uint64_t>(Stream::estimator)),
                               static_cast<std::uint64_t>(m));
        }
    }

    void SimulationConfig::validate() const
    {
        scenario.validate();
        ofdm.validate(scenario.nu_max, consts().c);
        estimator.validate();
        if (!(detector.p_fa > 0.0 && detector.p_fa < 1.0))
            throw ConfigError("detector.p_fa: must lie in (0, 1)");
        if (detector.mc_trials < 1)
            throw ConfigError("detector.mc_trials: must be >= 1");
        if (!(detector.noise_scale >= 0.0) || !std::isfinite(detector.noise_scale))
            throw ConfigError("detector.noise_scale: must be finite and >= 0");
        if (waveform.pilot_length < 0)
            throw ConfigError("waveform.pilot_length: must be >= 0");
        if (threads < 1)
            throw ConfigError("run.threads: must be >= 1");
        for (double nu : case2_nu_max)
            if (!(nu >= 0.0) || !std::isfinite(nu))
                throw ConfigError("experiments.case2_nu_max: entries must be finite and >= 0");
        for (int nc : case3_nc)
            if (nc < 1)
                throw ConfigError("experiments.case3_nc: entries must be >= 1");
    }

    double SimulationConfig::noise_var() const
    {
        return detector.noise_scale * noise_variance(scenario.noise_psd_dbm_hz, scenario.noise_figure_db, ofdm.delta_f);
    }

    // ---- Trial synthesis --------------------------------------------------------------------

    std::vector<DopplerResponseStack> Trial::stacks(const Velocity3 &v) const
    {
        std::vector<DopplerResponseStack> out;
        out.reserve(model->n_rx());
        for (int r = 0; r < model->n_rx(); ++r)
            out.push_back(model->stack(r, v));
        return out;
    }

    std::vector<RMatrix> Trial::covariances() const
    {
        return std::vector<RMatrix>(model->n_rx(), rcs_cov);
    }

    int Trial::total_rank(const Velocity3 &v) const
    {
        int total = 0;
        for (int r = 0; r < model->n_rx(); ++r)
            total += numerical_rank(model->stack(r, v).D);
        return total;
    }

    Trial make_trial(const SimulationConfig &cfg, std::uint64_t seed, const TrialOptions &opts)
    {
        Trial t;
        t.seed = seed;
        t.grid = cfg.ofdm;
        t.present = opts.target_present;
        t.net = build_network(cfg.scenario, cfg.consts(), seed, opts.target_present);
        if (opts.velocity)
            t.net.target.velocity = *opts.velocity;
        t.v_true = t.net.target.velocity;

        const double physical_noise =
            noise_variance(cfg.scenario.noise_psd_dbm_hz, cfg.scenario.noise_figure_db, cfg.ofdm.delta_f);
        t.noise_var = cfg.noise_var();
        t.frames = assemble_frames(t.net, t.grid, cfg.waveform, physical_noise, seed);

        t.region = t.net.target.region;
        t.cell = t.net.inspected.at(t.region);
        const std::vector<int> &raps = t.net.assoc.region_raps.at(t.region);
        const DelayConvention convention = opts.delay.value_or(cfg.delay);

        t.rcs_cov = rcs_covariance(t.cell, t.net.tap_positions(), cfg.scenario.rcs_variance(),
                                   cfg.scenario.rcs_corr_len);

        Rng rcs_rng = make_rng(seed, Stream::rcs);
        Rng direct_rng = make_rng(seed, Stream::direct);
        Rng noise_rng = make_rng(seed, Stream::noise);
        for (int rap : raps)
        {
            CVector alpha = draw_rcs(t.rcs_cov, rcs_rng);
            std::vector<SensingChannelFactors> echoes;
            std::vector<DirectChannel> direct;
            for (std::size_t k = 0; k < t.net.tx_ids.size(); ++k)
            {
                const int tap = t.net.tx_ids[k];
                echoes.push_back(sensing_channel(t.net, t.cell, t.v_true, rap, tap, alpha(static_cast<Eigen::Index>(k)),
                                                 t.grid, convention));
                direct.push_back(direct_ap_channel(t.net, rap, tap, t.grid, direct_rng));
            }
            t.observations.push_back(synthesize_observation(t.frames.frames, echoes, direct, opts.target_present,
                                                            t.noise_var, noise_rng));
            t.alpha.push_back(std::move(alpha));
        }
        t.model = std::make_unique<ResponseModel>(t.net, t.frames, t.grid, t.cell, raps, convention);
        return t;
    }

    void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &fn)
    {
        const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&]
                              {
                for (std::size_t i = next++; i < n; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        next = n;
                    }
                } });
        for (auto &th : pool)
            th.join();
        if (failure)
            std::rethrow_exception(failure);
    }

    // ---- CDFs ------------------------------------------------------------------------------------

    CDFSeries empirical_cdf(std::vector<double> samples)
    {
        if (samples.empty())
            throw ConfigError("empirical_cdf: empty sample");
        std::sort(samples.begin(), samples.end());
        CDFSeries c;
        const double n = static_cast<double>(samples.size());
        c.p.reserve(samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k)
            c.p.push_back(static_cast<double>(k + 1) / n);
        c.values = std::move(samples);
        return c;
    }

    double percentile(std::vector<double> samples, double q)
    {
        if (samples.empty())
            throw ConfigError("percentile: empty sample");
        if (!(q >= 0.0 && q <= 1.0))
            throw ConfigError("percentile: q must lie in [0, 1]");
        std::sort(samples.begin(), samples.end());
        const double pos = q * static_cast<double>(samples.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, samples.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return samples[lo] + frac * (samples[hi] - samples[lo]);
    }

    double median(std::vector<double> samples) { return percentile(std::move(samples), 0.5); }

    // ---- Case 1 -----------------------------------------------------------------------------------

    std::array<CDFSeries, 3> Case1Result::error_cdfs(EstimatorMethod m) const
    {
        std::array<std::vector<double>, 3> axes;
        for (const auto &row : rows)
            if (row.method == m)
                for (int c = 0; c < 3; ++c)
                    axes[c].push_back(row.error_speednorm[c]);
        return {empirical_cdf(axes[0]), empirical_cdf(axes[1]), empirical_cdf(axes[2])};
    }

    Case1Result run_case1(const SimulationConfig &cfg, std::size_t n_trials, std::uint64_t seed)
    {
        if (n_trials < 1)
            throw ConfigError("run.trials: must be >= 1");
        cfg.validate();

        constexpr std::size_t n_methods = all_methods.size();
        std::vector<std::vector<Case1Row>> per_trial(n_trials);
        std::vector<std::array<double, n_methods>> times(n_trials);
        std::vector<std::array<double, n_methods>> evals(n_trials);

        std::mutex timing_mutex;
        parallel_for(n_trials, cfg.threads, [&](std::size_t i)
                     {
            const std::uint64_t trial_seed = derive_seed(seed, i);
            const Trial trial = make_trial(cfg, trial_seed);
            // Timed estimator runs never overlap when timed_single_thread is set.
            std::unique_lock<std::mutex> timing_lock(timing_mutex, std::defer_lock);
            if (cfg.timed_single_thread)
                timing_lock.lock();
            const auto rel = relative_component_error({}, trial.v_true);
            for (std::size_t k = 0; k < n_methods; ++k)
            {
                const EstimatorMethod m = all_methods[k];
                EstimatorConfig ec = cfg.estimator;
                ec.method = m;
                GlrtObjective objective = trial.objective();
                const VelocityEstimate e = estimate_velocity(std::cref(objective), cfg.box(), ec, method_seed(trial_seed, m));
                times[i][k] = e.wall_time;
                evals[i][k] = static_cast<double>(e.evaluations);

                const auto speednorm = relative_component_error(e.v, trial.v_true);
                if (!rel || !speednorm)
                    continue; // stationary target: relative error undefined
                Case1Row row;
                row.trial = i;
                row.method = m;
                row.v_true = trial.v_true;
                row.v_hat = e.v;
                row.error = per_component_error(e.v, trial.v_true);
                row.error_speednorm = *speednorm;
                row.statistic = e.statistic;
                row.evaluations = e.evaluations;
                row.wall_time = e.wall_time;
                per_trial[i].push_back(row);
            } });

        Case1Result result;
        for (auto &rows : per_trial)
            for (auto &row : rows)
                result.rows.push_back(row);

        std::array<double, n_methods> mean_time{}, mean_evals{};
        for (std::size_t i = 0; i < n_trials; ++i)
            for (std::size_t k = 0; k < n_methods; ++k)
            {
                mean_time[k] += times[i][k] / static_cast<double>(n_trials);
                mean_evals[k] += evals[i][k] / static_cast<double>(n_trials);
            }
        for (std::size_t k = 0; k < n_methods; ++k)
        {
            TimingRecord rec;
            rec.method = all_methods[k];
            rec.mean_time = mean_time[k];
            rec.normalized_time = mean_time[k] / mean_time[0];
            rec.mean_evaluations = mean_evals[k];
            result.timing.push_back(rec);
        }
        return result;
    }

    // ---- Case 2 --------------------------------------------------------------------------------

    std::string to_string(Case2Scenario s)
    {
        switch (s)
        {
        case Case2Scenario::stationary:
            return "stationary";
        case Case2Scenario::estimated:
            return "pso_ri";
        case Case2Scenario::zero_velocity:
            return "zero_velocity";
        }
        return "unknown";
    }

    std::vector<double> Case2Result::gammas_db(Case2Scenario s, double nu_max) const
    {
        std::vector<double> out;
        for (const auto &row : rows)
            if (row.scenario == s && row.nu_max == nu_max)
                out.push_back(row.gamma_db);
        return out;
    }

    Case2Result run_case2(const SimulationConfig &cfg, std::size_t n_trials, std::uint64_t seed,
                          const std::vector<double> &nu_max_list)
    {
        if (n_trials < 1)
            throw ConfigError("run.trials: must be >= 1");
        cfg.validate();

        Case2Result result;
        for (double nu : nu_max_list)
        {
            SimulationConfig c = cfg;
            c.scenario.nu_max = nu;
            c.validate();

            // Trial seeds do not depend on nu_max: every sweep point reuses the same scenes.
            std::vector<std::array<double, 3>> gammas(n_trials);
            parallel_for(n_trials, c.threads, [&](std::size_t i)
                         {
                const std::uint64_t trial_seed = derive_seed(seed, i);
                const Trial trial = make_trial(c, trial_seed);
                const auto cov = trial.covariances();
                const Velocity3 zero{};
                const auto at_zero = trial.stacks(zero);
                const auto at_true = trial.stacks(trial.v_true);

                EstimatorConfig ec = c.estimator;
                ec.method = EstimatorMethod::pso_ri;
                GlrtObjective objective = trial.objective();
                const VelocityEstimate e = estimate_velocity(std::cref(objective), c.box(), ec,
                                                             method_seed(trial_seed, ec.method));
                const auto at_hat = trial.stacks(e.v);

                gammas[i][0] = realized_snr(at_zero, at_zero, cov, trial.noise_var).gamma_db;
                gammas[i][1] = realized_snr(at_true, at_hat, cov, trial.noise_var).gamma_db;
                gammas[i][2] = realized_snr(at_true, at_zero, cov, trial.noise_var).gamma_db; });

            constexpr std::array<Case2Scenario, 3> order = {Case2Scenario::stationary, Case2Scenario::estimated,
                                                            Case2Scenario::zero_velocity};
            for (std::size_t i = 0; i < n_trials; ++i)
                for (std::size_t s = 0; s < order.size(); ++s)
                    result.rows.push_back({i, order[s], nu, gammas[i][s]});
        }
        return result;
    }

    // ---- Case 3 ----------------------------------------------------------------------------------

    std::vector<double> Case3Result::gammas_db(int nc) const
    {
        std::vector<double> out;
        for (const auto &row : rows)
            if (row.nc == nc)
                out.push_back(row.gamma_db);
        return out;
    }

    Case3Result run_case3(const SimulationConfig &cfg, std::size_t n_trials, std::uint64_t seed,
                          const std::vector<int> &nc_list)
    {
        if (n_trials < 1)
            throw ConfigError("run.trials: must be >= 1");
        cfg.validate();

        Case3Result result;
        for (int nc : nc_list)
        {
            SimulationConfig c = cfg;
            c.ofdm.nc = nc;
            c.validate();

            std::vector<double> gammas(n_trials);
            parallel_for(n_trials, c.threads, [&](std::size_t i)
                         {
                const Trial trial = make_trial(c, derive_seed(seed, i));
                const auto cov = trial.covariances();
                gammas[i] = sensing_snr(trial.stacks(trial.v_true), cov, trial.noise_var).gamma_db; });
            for (std::size_t i = 0; i < n_trials; ++i)
                result.rows.push_back({i, nc, gammas[i]});
        }
        return result;
    }

    // ---- Detection and calibration ---------------------------------------------------------------

    double h0_statistic(const SimulationConfig &cfg, std::uint64_t seed, const std::optional<Velocity3> &fixed_v)
    {
        TrialOptions opts;
        opts.target_present = false;
        const Trial trial = make_trial(cfg, seed, opts);
        GlrtObjective objective = trial.objective();
        if (fixed_v)
            return objective(*fixed_v);
        const VelocityEstimate e = estimate_velocity(std::cref(objective), cfg.box(), cfg.estimator,
                                                     method_seed(seed, cfg.estimator.method));
        return std::max(e.statistic, objective(Velocity3{}));
    }

    CalibrationResult calibrate(const SimulationConfig &cfg, std::uint64_t seed)
    {
        cfg.validate();
        TrialOptions opts;
        opts.target_present = false;
        const Trial probe = make_trial(cfg, seed, opts);

        CalibrationResult out;
        out.total_rank = probe.total_rank(Velocity3{});
        out.noise_var = probe.noise_var;
        out.p_fa = cfg.detector.p_fa;

        std::function<double(std::size_t)> sampler;
        if (cfg.detector.threshold_mode == ThresholdMode::monte_carlo)
        {
            const std::uint64_t base = derive_seed(seed, calibration_salt);
            const std::size_t n = cfg.detector.mc_trials;
            auto samples = std::make_shared<std::vector<double>>(n);
            const std::optional<Velocity3> fixed = cfg.detector.mc_search ? std::nullopt
                                                                          : std::optional<Velocity3>(Velocity3{});
            parallel_for(n, cfg.threads, [&](std::size_t i)
                         { (*samples)[i] = h0_statistic(cfg, derive_seed(base, i), fixed); });
            sampler = [samples](std::size_t i)
            { return (*samples)[i]; };
        }
        out.threshold = calibrate_threshold(cfg.detector.threshold_mode, out.total_rank, out.noise_var,
                                            out.p_fa, sampler, cfg.detector.mc_trials);
        return out;
    }

    DetectRecord run_detect(const SimulationConfig &cfg, std::uint64_t seed)
    {
        const CalibrationResult cal = calibrate(cfg, seed);
        DetectRecord d;
        d.trial = make_trial(cfg, seed);
        const GlrtObjective objective = d.trial.objective();
        const SearchBox box = cfg.box();
        const EstimatorConfig ec = cfg.estimator;
        const std::uint64_t est_seed = method_seed(seed, ec.method);
        const VelocitySearch search = [&](const GlrtObjective &f)
        {
            return estimate_velocity(std::cref(f), box, ec, est_seed).v;
        };
        d.outcome = glrt_detect(objective, search, cal.threshold);
        return d;
    }

    // ---- CSV ----------------------------------------------------------------------------------------

    std::string format_number(double x)
    {
        if (std::isnan(x))
            return "nan";
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof(buf), x);
        return std::string(buf, res.ptr);
    }

    std::string csv_preamble(std::uint64_t seed, const std::string &config_hash)
    {
        return "# seed=" + std::to_string(seed) + "\n# config_hash=" + config_hash + "\n";
    }

    std::string case1_timing_csv(const Case1Result &r)
    {
        std::string out = "method,mean_time_s,normalized_time\n";
        for (const auto &t : r.timing)
            out += to_string(t.method) + "," + format_number(t.mean_time) + "," + format_number(t.normalized_time) + "\n";
        return out;
    }

    std::string case1_errors_csv(const Case1Result &r)
    {
        std::string out = "trial,method,ex,ey,ez,ex_speednorm,ey_speednorm,ez_speednorm\n";
        for (const auto &row : r.rows)
        {
            out += std::to_string(row.trial) + "," + to_string(row.method);
            for (double e : row.error)
                out += "," + format_number(e);
            for (double e : row.error_speednorm)
                out += "," + format_number(e);
            out += "\n";
        }
        return out;
    }

    std::string case2_csv(const Case2Result &r)
    {
        std::string out = "trial,scenario,nu_max,gamma_db\n";
        for (const auto &row : r.rows)
            out += std::to_string(row.trial) + "," + to_string(row.scenario) + "," + format_number(row.nu_max) + "," +
                   format_number(row.gamma_db) + "\n";
        return out;
    }

    std::string case3_csv(const Case3Result &r)
    {
        std::string out = "trial,nc,gamma_db\n";
        for (const auto &row : r.rows)
            out += std::to_string(row.trial) + "," + std::to_string(row.nc) + "," + format_number(row.gamma_db) + "\n";
        return out;
    }

    std::string detect_csv_header()
    {
        return "seed,statistic,threshold,target_detected,vx_hat,vy_hat,vz_hat,vx_true,vy_true,vz_true,evaluations,"
               "estimator_failed\n";
    }

    std::string detect_csv_row(std::uint64_t seed, const DetectRecord &d)
    {
        const DetectionOutcome &o = d.outcome;
        const Velocity3 &v = d.trial.v_true;
        std::ostringstream s;
        s << seed << ',' << format_number(o.statistic) << ',' << format_number(o.threshold) << ','
          << (o.target_detected ? 1 : 0) << ',' << format_number(o.v_hat.x) << ',' << format_number(o.v_hat.y) << ','
          << format_number(o.v_hat.z) << ',' << format_number(v.x) << ',' << format_number(v.y) << ','
          << format_number(v.z) << ',' << o.evaluations << ',' << (o.estimator_failed ? 1 : 0) << '\n';
        return s.str();
    }
}
