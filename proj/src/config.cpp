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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace cfisac
{
    namespace
    {
        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        double to_double(const std::string &key, const std::string &v)
        {
            double x = 0;
            const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
            if (res.ec != std::errc() || res.ptr != v.data() + v.size())
                throw ConfigError(key + ": cannot parse '" + v + "' as a number");
            return x;
        }

        long long to_int(const std::string &key, const std::string &v)
        {
            long long x = 0;
            const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
            if (res.ec != std::errc() || res.ptr != v.data() + v.size())
                throw ConfigError(key + ": cannot parse '" + v + "' as an integer");
            return x;
        }

        std::uint64_t to_uint(const std::string &key, const std::string &v)
        {
            std::uint64_t x = 0;
            const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
            if (res.ec != std::errc() || res.ptr != v.data() + v.size())
                throw ConfigError(key + ": cannot parse '" + v + "' as a non-negative integer");
            return x;
        }

        bool to_bool(const std::string &key, const std::string &v)
        {
            if (v == "true" || v == "1")
                return true;
            if (v == "false" || v == "0")
                return false;
            throw ConfigError(key + ": expected true or false, got '" + v + "'");
        }

        std::vector<std::string> split_list(const std::string &v)
        {
            std::vector<std::string> out;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ','))
                out.push_back(trim(item));
            return out;
        }

        struct Field
        {
            std::function<void(RunConfig &, const std::string &, const std::string &)> set;
            std::function<std::string(const RunConfig &)> get;
            bool hashed = true;
        };

        std::string num(double x) { return format_number(x); }

        template <class T>
        Field real(T SimulationConfig::*group, double T::*member)
        {
            return {[=](RunConfig &c, const std::string &k, const std::string &v)
                    { c.sim.*group.*member = to_double(k, v); },
                    [=](const RunConfig &c)
                    { return num(c.sim.*group.*member); }};
        }

        template <class T>
        Field integer(T SimulationConfig::*group, int T::*member)
        {
            return {[=](RunConfig &c, const std::string &k, const std::string &v)
                    {
                        const long long x = to_int(k, v);
                        if (x < -1000000000LL || x > 1000000000LL)
                            throw ConfigError(k + ": out of range");
                        c.sim.*group.*member = static_cast<int>(x);
                    },
                    [=](const RunConfig &c)
                    { return std::to_string(c.sim.*group.*member); }};
        }

        template <class T>
        Field boolean(T SimulationConfig::*group, bool T::*member)
        {
            return {[=](RunConfig &c, const std::string &k, const std::string &v)
                    { c.sim.*group.*member = to_bool(k, v); },
                    [=](const RunConfig &c)
                    { return std::string(c.sim.*group.*member ? "true" : "false"); }};
        }

        const std::map<std::string, Field> &fields()
        {
            static const std::map<std::string, Field> table = []
            {
                using S = ScenarioConfig;
                using O = OFDMGrid;
                using E = EstimatorConfig;
                using W = WaveformOptions;
                using D = DetectorConfig;
                constexpr auto sc = &SimulationConfig::scenario;
                constexpr auto of = &SimulationConfig::ofdm;
                constexpr auto es = &SimulationConfig::estimator;
                constexpr auto wf = &SimulationConfig::waveform;
                constexpr auto de = &SimulationConfig::detector;

                std::map<std::string, Field> t;
                t["scenario.area_side"] = real(sc, &S::area_side);
                t["scenario.n_aps"] = integer(sc, &S::n_aps);
                t["scenario.n_tx"] = integer(sc, &S::n_tx);
                t["scenario.n_rx"] = integer(sc, &S::n_rx);
                t["scenario.n_ues"] = integer(sc, &S::n_ues);
                t["scenario.n_regions"] = integer(sc, &S::n_regions);
                t["scenario.serving_aps"] = integer(sc, &S::serving_aps);
                t["scenario.n_antennas"] = integer(sc, &S::n_antennas);
                t["scenario.ap_height"] = real(sc, &S::ap_height);
                t["scenario.ue_height"] = real(sc, &S::ue_height);
                t["scenario.target_height_min"] = real(sc, &S::target_height_min);
                t["scenario.target_height_max"] = real(sc, &S::target_height_max);
                t["scenario.nu_max"] = real(sc, &S::nu_max);
                t["scenario.rcs_variance_dbsm"] = real(sc, &S::rcs_variance_dbsm);
                t["scenario.ap_power_w"] = real(sc, &S::ap_power_w);
                t["scenario.noise_psd_dbm_hz"] = real(sc, &S::noise_psd_dbm_hz);
                t["scenario.noise_figure_db"] = real(sc, &S::noise_figure_db);
                t["scenario.cells_per_axis"] = integer(sc, &S::cells_per_axis);
                t["scenario.tx_per_region"] = integer(sc, &S::tx_per_region);
                t["scenario.rx_per_region"] = integer(sc, &S::rx_per_region);
                t["scenario.rcs_corr_len"] = real(sc, &S::rcs_corr_len);
                t["scenario.roles"] = {[](RunConfig &c, const std::string &, const std::string &v)
                                       { c.sim.scenario.roles = v; },
                                       [](const RunConfig &c)
                                       { return c.sim.scenario.roles; }};

                t["ofdm.nc"] = integer(of, &O::nc);
                t["ofdm.ns"] = integer(of, &O::ns);
                t["ofdm.delta_f"] = real(of, &O::delta_f);
                t["ofdm.fc"] = real(of, &O::fc);
                t["ofdm.cp_ratio"] = real(of, &O::cp_ratio);
                t["ofdm.bandwidth_budget"] = real(of, &O::bandwidth_budget);

                t["channel.delay_convention"] = {
                    [](RunConfig &c, const std::string &k, const std::string &v)
                    {
                        if (v == "pair")
                            c.sim.delay = DelayConvention::pair;
                        else if (v == "per_cell")
                            c.sim.delay = DelayConvention::per_cell;
                        else
                            throw ConfigError(k + ": expected pair or per_cell, got '" + v + "'");
                    },
                    [](const RunConfig &c)
                    { return std::string(c.sim.delay == DelayConvention::pair ? "pair" : "per_cell"); }};

                t["waveform.coherent_sensing_stream"] = boolean(wf, &W::coherent_sensing_stream);
                t["waveform.perfect_csi"] = boolean(wf, &W::perfect_csi);
                t["waveform.pilot_length"] = integer(wf, &W::pilot_length);

                t["detector.p_fa"] = real(de, &D::p_fa);
                t["detector.noise_scale"] = real(de, &D::noise_scale);
                t["detector.mc_search"] = boolean(de, &D::mc_search);
                t["detector.mc_trials"] = {[](RunConfig &c, const std::string &k, const std::string &v)
                                           { c.sim.detector.mc_trials = to_uint(k, v); },
                                           [](const RunConfig &c)
                                           { return std::to_string(c.sim.detector.mc_trials); }};
                t["detector.threshold_mode"] = {
                    [](RunConfig &c, const std::string &k, const std::string &v)
                    {
                        if (v == "analytic")
                            c.sim.detector.threshold_mode = ThresholdMode::analytic;
                        else if (v == "monte_carlo")
                            c.sim.detector.threshold_mode = ThresholdMode::monte_carlo;
                        else
                            throw ConfigError(k + ": expected analytic or monte_carlo, got '" + v + "'");
                    },
                    [](const RunConfig &c)
                    {
                        return std::string(c.sim.detector.threshold_mode == ThresholdMode::analytic ? "analytic"
                                                                                                     : "monte_carlo");
                    }};

                t["estimator.method"] = {[](RunConfig &c, const std::string &k, const std::string &v)
                                         {
                                             try
                                             {
                                                 c.sim.estimator.method = parse_method(v);
                                             }
                                             catch (const ConfigError &)
                                             {
                                                 throw ConfigError(k + ": unknown method '" + v + "'");
                                             }
                                         },
                                         [](const RunConfig &c)
                                         { return to_string(c.sim.estimator.method); }};
                t["estimator.grid_points"] = integer(es, &E::grid_points);
                t["estimator.coarse_points"] = integer(es, &E::coarse_points);
                t["estimator.pso_swarm"] = integer(es, &E::pso_swarm);
                t["estimator.pso_iterations"] = integer(es, &E::pso_iterations);
                t["estimator.pso_patience"] = integer(es, &E::pso_patience);
                t["estimator.pso_tol"] = real(es, &E::pso_tol);
                t["estimator.pso_inertia"] = real(es, &E::pso_inertia);
                t["estimator.pso_c1"] = real(es, &E::pso_c1);
                t["estimator.pso_c2"] = real(es, &E::pso_c2);
                t["estimator.grad_max_iters"] = integer(es, &E::grad_max_iters);
                t["estimator.grad_fd_step"] = real(es, &E::grad_fd_step);
                t["estimator.grad_init_step"] = real(es, &E::grad_init_step);
                t["estimator.grad_backtrack"] = real(es, &E::grad_backtrack);
                t["estimator.grad_tol"] = real(es, &E::grad_tol);
                t["estimator.grad_min_step"] = real(es, &E::grad_min_step);

                t["experiments.case2_nu_max"] = {
                    [](RunConfig &c, const std::string &k, const std::string &v)
                    {
                        std::vector<double> xs;
                        for (const auto &item : split_list(v))
                            xs.push_back(to_double(k, item));
                        if (xs.empty())
                            throw ConfigError(k + ": empty list");
                        c.sim.case2_nu_max = xs;
                    },
                    [](const RunConfig &c)
                    {
                        std::string s;
                        for (double x : c.sim.case2_nu_max)
                            s += (s.empty() ? "" : ",") + num(x);
                        return s;
                    }};
                t["experiments.case3_nc"] = {
                    [](RunConfig &c, const std::string &k, const std::string &v)
                    {
                        std::vector<int> xs;
                        for (const auto &item : split_list(v))
                        {
                            const long long x = to_int(k, item);
                            if (x < 1 || x > 1000000)
                                throw ConfigError(k + ": entries must lie in [1, 1000000]");
                            xs.push_back(static_cast<int>(x));
                        }
                        if (xs.empty())
                            throw ConfigError(k + ": empty list");
                        c.sim.case3_nc = xs;
                    },
                    [](const RunConfig &c)
                    {
                        std::string s;
                        for (int x : c.sim.case3_nc)
                            s += (s.empty() ? "" : ",") + std::to_string(x);
                        return s;
                    }};
                t["experiments.timed_single_thread"] = {
                    [](RunConfig &c, const std::string &k, const std::string &v)
                    { c.sim.timed_single_thread = to_bool(k, v); },
                    [](const RunConfig &c)
                    { return std::string(c.sim.timed_single_thread ? "true" : "false"); },
                    false};

                t["run.seed"] = {[](RunConfig &c, const std::string &k, const std::string &v)
                                 { c.seed = to_uint(k, v); },
                                 [](const RunConfig &c)
                                 { return std::to_string(c.seed); },
                                 false};
                t["run.trials"] = {[](RunConfig &c, const std::string &k, const std::string &v)
                                   { c.trials = to_uint(k, v); },
                                   [](const RunConfig &c)
                                   { return std::to_string(c.trials); }};
                t["run.out_dir"] = {[](RunConfig &c, const std::string &, const std::string &v)
                                    { c.out_dir = v; },
                                    [](const RunConfig &c)
                                    { return c.out_dir; },
                                    false};
                t["run.threads"] = {[](RunConfig &c, const std::string &k, const std::string &v)
                                    {
                                        const long long x = to_int(k, v);
                                        if (x < 1 || x > 4096)
                                            throw ConfigError(k + ": must lie in [1, 4096]");
                                        c.sim.threads = static_cast<int>(x);
                                    },
                                    [](const RunConfig &c)
                                    { return std::to_string(c.sim.threads); },
                                    false};
                return t;
            }();
            return table;
        }

        void apply_overrides(RunConfig &cfg, const std::vector<std::string> &overrides)
        {
            for (const auto &o : overrides)
            {
                const auto eq = o.find('=');
                if (eq == std::string::npos)
                    throw ConfigError("--set " + o + ": expected key=value");
                const std::string key = trim(o.substr(0, eq));
                apply_setting(cfg, key, trim(o.substr(eq + 1)));
                cfg.origin[key] = "--set";
            }
        }
    }

    std::size_t default_trials(const std::string &subcommand)
    {
        if (subcommand == "case1")
            return 200;
        if (subcommand == "case2" || subcommand == "case3")
            return 300;
        return 1;
    }

    std::vector<std::string> config_keys()
    {
        std::vector<std::string> keys;
        for (const auto &[k, f] : fields())
            keys.push_back(k);
        return keys;
    }

    void apply_setting(RunConfig &cfg, const std::string &key, const std::string &value)
    {
        const auto it = fields().find(key);
        if (it == fields().end())
            throw ConfigError(key + ": unknown key");
        it->second.set(cfg, key, value);
    }

    std::string get_setting(const RunConfig &cfg, const std::string &key)
    {
        const auto it = fields().find(key);
        if (it == fields().end())
            throw ConfigError(key + ": unknown key");
        return it->second.get(cfg);
    }

    RunConfig parse_config_text(const std::string &text, const std::string &source,
                                const std::vector<std::string> &overrides)
    {
        RunConfig cfg;
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const std::string where = source + ":" + std::to_string(line_no);
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(where + ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            try
            {
                apply_setting(cfg, key, trim(line.substr(eq + 1)));
            }
            catch (const ConfigError &e)
            {
                throw ConfigError(where + ": " + e.what());
            }
            cfg.origin[key] = where;
        }
        apply_overrides(cfg, overrides);
        validate(cfg);
        return cfg;
    }

    RunConfig parse_config(const std::string &path, const std::vector<std::string> &overrides)
    {
        if (path.empty())
            return parse_config_text("", "<defaults>", overrides);
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw ConfigError(path + ": cannot open config file");
        std::stringstream buf;
        buf << f.rdbuf();
        return parse_config_text(buf.str(), path, overrides);
    }

    void validate(const RunConfig &cfg)
    {
        try
        {
            cfg.sim.validate();
        }
        catch (const ConfigError &e)
        {
            // Messages start with "<dotted key>:"; attribute them to where the key was set.
            const std::string msg = e.what();
            const std::string key = msg.substr(0, msg.find(':'));
            const auto it = cfg.origin.find(key);
            if (it != cfg.origin.end())
                throw ConfigError(it->second + ": " + msg);
            throw;
        }
    }

    std::string config_hash(const RunConfig &cfg)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const auto &[key, field] : fields())
        {
            if (!field.hashed)
                continue;
            for (char ch : key + "=" + field.get(cfg) + "\n")
            {
                h ^= static_cast<unsigned char>(ch);
                h *= 0x100000001b3ULL;
            }
        }
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
}
