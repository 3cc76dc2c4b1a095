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
#include "cfisac/geometry.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace cfisac;

namespace
{
    using Overrides = std::vector<std::string>;

    RunConfig config_from(std::uint64_t seed, std::size_t trials, const Overrides &overrides)
    {
        Overrides all = overrides;
        all.push_back("run.seed=" + std::to_string(seed));
        if (trials > 0)
            all.push_back("run.trials=" + std::to_string(trials));
        return parse_config_text("", "python", all);
    }

    std::size_t trial_count(const RunConfig &cfg, const std::string &sub)
    {
        return cfg.trials > 0 ? cfg.trials : default_trials(sub);
    }

    Position3 position(const std::array<double, 3> &p) { return {p[0], p[1], p[2]}; }
    Velocity3 velocity(const std::array<double, 3> &v) { return {v[0], v[1], v[2]}; }
    std::array<double, 3> triple(const Velocity3 &v) { return {v.x, v.y, v.z}; }

    std::vector<ObservationStack> observations(const std::vector<CVector> &ys)
    {
        std::vector<ObservationStack> out;
        for (const CVector &y : ys)
            out.push_back({y, 0.0});
        return out;
    }

    std::vector<DopplerResponseStack> stacks(const std::vector<CMatrix> &ds)
    {
        std::vector<DopplerResponseStack> out;
        for (const CMatrix &d : ds)
            out.push_back({d, {}});
        return out;
    }
}

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Doppler-aware GLRT sensing simulator for cell-free ISAC networks";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<RankDeficient>(m, "RankDeficient", PyExc_ArithmeticError);

    m.def(
        "bistatic_doppler",
        [](const std::array<double, 3> &target, const std::array<double, 3> &v, const std::array<double, 3> &tap,
           const std::array<double, 3> &rap, double fc)
        { return bistatic_doppler(position(target), velocity(v), position(tap), position(rap), PhysicalConstants::at(fc)); },
        py::arg("target"), py::arg("velocity"), py::arg("tap"), py::arg("rap"), py::arg("fc") = 3e9,
        "Bistatic Doppler shift in Hz, positive for a closing target.");

    m.def(
        "glrt_statistic",
        [](const std::vector<CVector> &ys, const std::vector<CMatrix> &ds)
        {
            const auto o = observations(ys);
            const auto s = stacks(ds);
            return glrt_statistic(o, s);
        },
        py::arg("observations"), py::arg("responses"),
        "Summed projection energy of each observation onto its response column space.");

    m.def(
        "ml_rcs_estimate", [](const CMatrix &d, const CVector &y) { return ml_rcs_estimate({d, {}}, {y, 0.0}); },
        py::arg("response"), py::arg("observation"));

    m.def("gamma_threshold", &gamma_threshold, py::arg("total_rank"), py::arg("noise_var"), py::arg("p_fa"));

    m.def("config_keys", &config_keys);
    m.def(
        "config_hash", [](const Overrides &o) { return config_hash(parse_config_text("", "python", o)); },
        py::arg("overrides") = Overrides{});

    m.def(
        "calibrate",
        [](std::uint64_t seed, const Overrides &o)
        {
            const RunConfig cfg = config_from(seed, 0, o);
            CalibrationResult c;
            {
                py::gil_scoped_release release;
                c = calibrate(cfg.sim, cfg.seed);
            }
            return std::map<std::string, double>{{"total_rank", c.total_rank},
                                                 {"noise_var", c.noise_var},
                                                 {"p_fa", c.p_fa},
                                                 {"threshold", c.threshold}};
        },
        py::arg("seed") = 1, py::arg("overrides") = Overrides{});

    m.def(
        "detect",
        [](std::uint64_t seed, const Overrides &o)
        {
            const RunConfig cfg = config_from(seed, 0, o);
            DetectRecord d;
            {
                py::gil_scoped_release release;
                d = run_detect(cfg.sim, cfg.seed);
            }
            py::dict out;
            out["statistic"] = d.outcome.statistic;
            out["threshold"] = d.outcome.threshold;
            out["target_detected"] = d.outcome.target_detected;
            out["v_hat"] = triple(d.outcome.v_hat);
            out["v_true"] = triple(d.trial.v_true);
            out["evaluations"] = d.outcome.evaluations;
            out["estimator_failed"] = d.outcome.estimator_failed;
            out["alpha_hat"] = d.outcome.alpha_hat;
            return out;
        },
        py::arg("seed") = 1, py::arg("overrides") = Overrides{});

    // Case runners return {file name: CSV text} with the same bytes the command line writes.
    m.def(
        "case1",
        [](std::size_t trials, std::uint64_t seed, const Overrides &o)
        {
            const RunConfig cfg = config_from(seed, trials, o);
            const std::string pre = csv_preamble(cfg.seed, config_hash(cfg));
            py::gil_scoped_release release;
            const Case1Result r = run_case1(cfg.sim, trial_count(cfg, "case1"), cfg.seed);
            return std::map<std::string, std::string>{{"case1_timing.csv", pre + case1_timing_csv(r)},
                                                      {"case1_errors.csv", pre + case1_errors_csv(r)}};
        },
        py::arg("trials") = 0, py::arg("seed") = 1, py::arg("overrides") = Overrides{});

    m.def(
        "case2",
        [](std::size_t trials, std::uint64_t seed, const Overrides &o)
        {
            const RunConfig cfg = config_from(seed, trials, o);
            const std::string pre = csv_preamble(cfg.seed, config_hash(cfg));
            py::gil_scoped_release release;
            const Case2Result r = run_case2(cfg.sim, trial_count(cfg, "case2"), cfg.seed, cfg.sim.case2_nu_max);
            return std::map<std::string, std::string>{{"case2_snr.csv", pre + case2_csv(r)}};
        },
        py::arg("trials") = 0, py::arg("seed") = 1, py::arg("overrides") = Overrides{});

    m.def(
        "case3",
        [](std::size_t trials, std::uint64_t seed, const Overrides &o)
        {
            const RunConfig cfg = config_from(seed, trials, o);
            const std::string pre = csv_preamble(cfg.seed, config_hash(cfg));
            py::gil_scoped_release release;
            const Case3Result r = run_case3(cfg.sim, trial_count(cfg, "case3"), cfg.seed, cfg.sim.case3_nc);
            return std::map<std::string, std::string>{{"case3_snr.csv", pre + case3_csv(r)}};
        },
        py::arg("trials") = 0, py::arg("seed") = 1, py::arg("overrides") = Overrides{});
}
