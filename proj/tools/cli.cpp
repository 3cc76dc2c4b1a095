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

#include "cfisac/config.hpp"
#include "cfisac/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{
    using namespace cfisac;

    void write_file(const std::filesystem::path &path, const std::string &body)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        out << body;
        if (!out)
            throw std::runtime_error("write failed for " + path.string());
    }

    int run(const std::string &sub, const RunConfig &cfg)
    {
        const std::size_t trials = cfg.trials > 0 ? cfg.trials : default_trials(sub);
        const std::string preamble = csv_preamble(cfg.seed, config_hash(cfg));
        const std::filesystem::path dir(cfg.out_dir);

        if (sub == "case1" || sub == "case2" || sub == "case3")
            std::filesystem::create_directories(dir);

        if (sub == "case1")
        {
            const Case1Result r = run_case1(cfg.sim, trials, cfg.seed);
            write_file(dir / "case1_timing.csv", preamble + case1_timing_csv(r));
            write_file(dir / "case1_errors.csv", preamble + case1_errors_csv(r));
        }
        else if (sub == "case2")
        {
            const Case2Result r = run_case2(cfg.sim, trials, cfg.seed, cfg.sim.case2_nu_max);
            write_file(dir / "case2_snr.csv", preamble + case2_csv(r));
        }
        else if (sub == "case3")
        {
            const Case3Result r = run_case3(cfg.sim, trials, cfg.seed, cfg.sim.case3_nc);
            write_file(dir / "case3_snr.csv", preamble + case3_csv(r));
        }
        else if (sub == "calibrate")
        {
            const CalibrationResult c = calibrate(cfg.sim, cfg.seed);
            std::cout << "r_tot,noise_var,p_fa,delta_prime\n"
                      << c.total_rank << ',' << format_number(c.noise_var) << ',' << format_number(c.p_fa) << ','
                      << format_number(c.threshold) << '\n';
        }
        else if (sub == "detect")
        {
            const DetectRecord d = run_detect(cfg.sim, cfg.seed);
            std::cout << detect_csv_header() << detect_csv_row(cfg.seed, d);
        }
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"cfisac: Doppler-aware sensing simulator for cell-free ISAC networks"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::vector<std::string> sets;

    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--trials", trials, "Monte Carlo trials");
    app.add_option("--out-dir", out_dir, "output directory for CSV files");
    app.add_option("--set", sets, "key=value override, repeatable")->take_all()->allow_extra_args(false);
    app.add_option("--threads", threads, "worker threads");

    app.add_subcommand("case1", "estimator timing and velocity error CSVs");
    app.add_subcommand("case2", "Doppler-mismatch realized SNR CSV");
    app.add_subcommand("case3", "subcarrier-sweep sensing SNR CSV");
    app.add_subcommand("calibrate", "print the detection threshold");
    app.add_subcommand("detect", "run one seeded trial and print the outcome");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try
    {
        std::vector<std::string> overrides = sets;
        if (seed)
            overrides.push_back("run.seed=" + std::to_string(*seed));
        if (trials)
            overrides.push_back("run.trials=" + std::to_string(*trials));
        if (out_dir)
            overrides.push_back("run.out_dir=" + *out_dir);
        if (threads)
            overrides.push_back("run.threads=" + std::to_string(*threads));
        const RunConfig cfg = parse_config(config_path, overrides);
        return run(sub, cfg);
    }
    catch (const cfisac::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
