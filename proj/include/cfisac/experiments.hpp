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

#include "cfisac/sensing.hpp"
#include "cfisac/velocity.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cfisac
{
    struct DetectorConfig
    {
        double p_fa = 0.05;
        ThresholdMode threshold_mode = ThresholdMode::analytic;
        std::size_t mc_trials = 20000;
        double noise_scale = 1.0; // multiplies the thermal noise variance
        bool mc_search = false;   // monte_carlo mode: calibrate the velocity-maximized statistic
    };

    /// Everything a simulation run needs apart from seed, trial count and output location.
    struct SimulationConfig
    {
        ScenarioConfig scenario;
        OFDMGrid ofdm;
        WaveformOptions waveform;
        DetectorConfig detector;
        EstimatorConfig estimator;
        DelayConvention delay = DelayConvention::pair;
        std::vector<double> case2_nu_max = {50.0, 100.0, 150.0};
        std::vector<int> case3_nc = {1, 6, 12, 24};
        int threads = 1;
        bool timed_single_thread = true;

        void validate() const;
        PhysicalConstants consts() const { return PhysicalConstants::at(ofdm.fc); }
        double noise_var() const;
        SearchBox box() const { return {scenario.nu_max}; }
    };

    struct TrialOptions
    {
        bool target_present = true;
        std::optional<Velocity3> velocity; // overrides the drawn target velocity
        std::optional<DelayConvention> delay;
    };

    /// One fully synthesized sensing block for the target's region.
    struct Trial
    {
        std::uint64_t seed = 0;
        Network net;
        OFDMGrid grid;
        FrameSet frames;
        int region = 0;
        Position3 cell;
        Velocity3 v_true;
        bool present = true;
        RMatrix rcs_cov;
        std::vector<CVector> alpha; // per rAP
        double noise_var = 0;
        std::vector<ObservationStack> observations;
        std::unique_ptr<ResponseModel> model;

        GlrtObjective objective() const { return GlrtObjective(*model, observations); }
        std::vector<DopplerResponseStack> stacks(const Velocity3 &v) const;
        std::vector<RMatrix> covariances() const;
        int total_rank(const Velocity3 &v) const;
    };

    Trial make_trial(const SimulationConfig &cfg, std::uint64_t seed, const TrialOptions &opts = {});

    /// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be written by index.
    void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &fn);

    // ---- Empirical CDFs ------------------------------------------------------------------

    struct CDFSeries
    {
        std::vector<double> values; // ascending
        std::vector<double> p;      // k / N
    };

    /// Throws ConfigError for an empty sample.
    CDFSeries empirical_cdf(std::vector<double> samples);

    /// Linear-interpolated percentile, q in [0, 1].
    double percentile(std::vector<double> samples, double q);
    double median(std::vector<double> samples);

    // ---- Case study 1: estimator accuracy and timing ------------------------------------

    struct Case1Row
    {
        std::size_t trial = 0;
        EstimatorMethod method = EstimatorMethod::grid;
        Velocity3 v_true;
        Velocity3 v_hat;
        std::array<double, 3> error{};           // per-component normalization
        std::array<double, 3> error_speednorm{}; // normalized by ||v_true||
        double statistic = 0;
        std::size_t evaluations = 0;
        double wall_time = 0;
    };

    struct TimingRecord
    {
        EstimatorMethod method = EstimatorMethod::grid;
        double mean_time = 0;
        double normalized_time = 0;
        double mean_evaluations = 0;
    };

    struct Case1Result
    {
        std::vector<Case1Row> rows; // one per (trial, method), stationary targets excluded
        std::vector<TimingRecord> timing;

        /// Speed-normalized error CDF per axis for one method.
        std::array<CDFSeries, 3> error_cdfs(EstimatorMethod m) const;
    };

    Case1Result run_case1(const SimulationConfig &cfg, std::size_t n_trials, std::uint64_t seed);

    // ---- Case study 2: Doppler mismatch ---------------------------------------------------

    enum class Case2Scenario
    {
        stationary,
        estimated,    // moving target, PSO-RI velocity
        zero_velocity // moving target, detector assumes v = 0
    };

    std::string to_string(Case2Scenario s);

    struct Case2Row
    {
        std::size_t trial = 0;
        Case2Scenario scenario = Case2Scenario::stationary;
        double nu_max = 0;
        double gamma_db = 0;
    };

    struct Case2Result
    {
        std::vector<Case2Row> rows;

        std::vector<double> gammas_db(Case2Scenario s, double nu_max) const;
    };

    Case2Result run_case2(const SimulationConfig &cfg, std::size_t n_trials, std::uint64_t seed,
                          const std::vector<double> &nu_max_list);

    // ---- Case study 3: subcarrier sweep -----------------------------------------------------

    struct Case3Row
    {
        std::size_t trial = 0;
        int nc = 0;
        double gamma_db = 0;
    };

    struct Case3Result
    {
        std::vector<Case3Row> rows;

        std::vector<double> gammas_db(int nc) const;
    };

    Case3Result run_case3(const SimulationConfig &cfg, std::size_t n_trials, std::uint64_t seed,
                          const std::vector<int> &nc_list);

    // ---- Detection and calibration -----------------------------------------------------------

    /// H0 statistic of one seeded target-free block: evaluated at `fixed_v`, or maximized with
    /// the configured estimator when `fixed_v` is empty.
    double h0_statistic(const SimulationConfig &cfg, std::uint64_t seed, const std::optional<Velocity3> &fixed_v);

    struct CalibrationResult
    {
        int total_rank = 0;
        double noise_var = 0;
        double p_fa = 0;
        double threshold = 0;
    };

    /// Threshold for the configured detector. The rank comes from the seeded block's
    /// zero-velocity stacks.
    CalibrationResult calibrate(const SimulationConfig &cfg, std::uint64_t seed);

    struct DetectRecord
    {
        Trial trial;
        DetectionOutcome outcome;
    };

    DetectRecord run_detect(const SimulationConfig &cfg, std::uint64_t seed);

    // ---- CSV ----------------------------------------------------------------------------------

    /// "# seed=<n>\n# config_hash=<hex>\n"
    std::string csv_preamble(std::uint64_t seed, const std::string &config_hash);

    std::string case1_timing_csv(const Case1Result &r);
    std::string case1_errors_csv(const Case1Result &r);
    std::string case2_csv(const Case2Result &r);
    std::string case3_csv(const Case3Result &r);
    std::string detect_csv_header();
    std::string detect_csv_row(std::uint64_t seed, const DetectRecord &d);

    /// Shortest round-trip decimal rendering used in all CSV output.
    std::string format_number(double x);
}
