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

// Flat dotted-key configuration: defaults, overrides, errors, hashing.

#include "cfisac/config.hpp"
#include "support.hpp"

#include <cstdio>
#include <fstream>

using namespace cfisac;
using namespace testing;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("empty configuration reproduces the default table", "[config]")
{
    const RunConfig c = parse_config_text("", "empty");
    CHECK(c.sim.ofdm.fc == 3e9);
    CHECK(c.sim.ofdm.delta_f == 30e3);
    CHECK(c.sim.ofdm.nc == 12);
    CHECK(c.sim.ofdm.ns == 14);
    CHECK(c.sim.scenario.n_aps == 16);
    CHECK(c.sim.scenario.n_ues == 8);
    CHECK(c.sim.scenario.nu_max == 150.0);
    CHECK(c.sim.detector.p_fa == 0.05);
    CHECK(c.sim.estimator.method == EstimatorMethod::pso_ri);
    CHECK(c.seed == 1);
    CHECK(parse_config("").sim.ofdm.nc == 12);
}

TEST_CASE("file values and overrides", "[config]")
{
    const std::string text = "# comment\n"
                             "ofdm.nc = 24   # trailing comment\n"
                             "\n"
                             "estimator.method = grid\n"
                             "experiments.case3_nc = 1, 12\n"
                             "channel.delay_convention = per_cell\n";
    const RunConfig c = parse_config_text(text, "t.cfg", {"estimator.method=grad_cgi", "run.seed=9"});
    CHECK(c.sim.ofdm.nc == 24);
    CHECK(c.sim.estimator.method == EstimatorMethod::grad_cgi);
    CHECK(c.sim.case3_nc == std::vector<int>{1, 12});
    CHECK(c.sim.delay == DelayConvention::per_cell);
    CHECK(c.seed == 9);
    CHECK(c.origin.at("ofdm.nc") == "t.cfg:2");
    CHECK(c.origin.at("estimator.method") == "--set");

    // Every key round-trips through get/apply.
    RunConfig d;
    for (const std::string &k : config_keys())
    {
        const std::string v = get_setting(c, k);
        CHECK_NOTHROW(apply_setting(d, k, v));
        CHECK(get_setting(d, k) == v);
    }
    CHECK(config_hash(d) == config_hash(c));
}

TEST_CASE("configuration errors name the key and line", "[config]")
{
    CHECK_THROWS_WITH(parse_config_text("# a = 1\nofdm.bogus = 3\n", "f.cfg"),
                      ContainsSubstring("f.cfg:2") && ContainsSubstring("ofdm.bogus"));
    CHECK_THROWS_WITH(parse_config_text("ofdm.nc = twelve\n", "f.cfg"),
                      ContainsSubstring("f.cfg:1") && ContainsSubstring("ofdm.nc"));
    CHECK_THROWS_WITH(parse_config_text("ofdm.delta_f = 1e3\n", "f.cfg"),
                      ContainsSubstring("f.cfg:1") && ContainsSubstring("3002"));
    CHECK_THROWS_WITH(parse_config_text("", "f.cfg", {"ofdm.delta_f=1e3"}),
                      ContainsSubstring("--set") && ContainsSubstring("ofdm.delta_f"));
    CHECK_THROWS_AS(parse_config_text("just words\n", "f.cfg"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("", "f.cfg", {"novalue"}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("waveform.perfect_csi = maybe\n", "f.cfg"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("detector.threshold_mode = bayes\n", "f.cfg"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("detector.p_fa = 0\n", "f.cfg"), ConfigError);
    CHECK_THROWS_AS(parse_config("/nonexistent/dir/x.cfg"), ConfigError);
}

TEST_CASE("configuration from a file", "[config]")
{
    const std::string path = "cfisac_test_config.cfg";
    {
        std::ofstream f(path, std::ios::binary);
        f << "ofdm.nc = 6\nrun.trials = 11\n";
    }
    const RunConfig c = parse_config(path, {"ofdm.ns=7"});
    CHECK(c.sim.ofdm.nc == 6);
    CHECK(c.sim.ofdm.ns == 7);
    CHECK(c.trials == 11);
    CHECK(c.origin.at("ofdm.nc") == path + ":1");
    std::remove(path.c_str());
}

TEST_CASE("configuration hash", "[config]")
{
    const RunConfig base = parse_config_text("", "x");
    const std::string h = config_hash(base);
    CHECK(h.size() == 16);
    CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(config_hash(parse_config_text("", "x", {"run.seed=5", "run.threads=4", "run.out_dir=/tmp"})) == h);
    CHECK(config_hash(parse_config_text("", "x", {"ofdm.nc=6"})) != h);
    CHECK(config_hash(parse_config_text("", "x", {"detector.p_fa=0.01"})) != h);
}

TEST_CASE("default trial counts", "[config]")
{
    CHECK(default_trials("case1") == 200);
    CHECK(default_trials("case2") == 300);
    CHECK(default_trials("case3") == 300);
    CHECK(default_trials("detect") == 1);
}
