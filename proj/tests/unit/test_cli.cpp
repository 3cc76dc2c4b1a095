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

// Command-line driver: exit codes, output files, determinism, calibrate output.

#include "support.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace testing;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace
{
    struct Run
    {
        int code = -1;
        std::string out, err;
    };

    std::string slurp(const fs::path &p)
    {
        std::ifstream f(p, std::ios::binary);
        std::stringstream s;
        s << f.rdbuf();
        return s.str();
    }

    Run cli(const std::string &args)
    {
        const fs::path dir = fs::temp_directory_path() / "cfisac_cli_test";
        fs::create_directories(dir);
        const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
        const std::string cmd = std::string("\"") + CFISAC_CLI_PATH + "\" " + args + " >\"" + out.string() +
                                "\" 2>\"" + err.string() + "\"";
        const int status = std::system(cmd.c_str());
        Run r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    fs::path fresh_dir(const std::string &name)
    {
        const fs::path d = fs::temp_directory_path() / name;
        fs::remove_all(d);
        return d;
    }
}

TEST_CASE("usage errors exit with code 2", "[cli]")
{
    const Run bogus = cli("bogus");
    CHECK(bogus.code == 2);
    CHECK_THAT(bogus.err, ContainsSubstring("case1"));

    CHECK(cli("").code == 2);
    const Run bad_key = cli("calibrate --set ofdm.bogus=1");
    CHECK(bad_key.code == 2);
    CHECK_THAT(bad_key.err, ContainsSubstring("ofdm.bogus"));

    const Run doppler = cli("calibrate --set ofdm.delta_f=1e3");
    CHECK(doppler.code == 2);
    CHECK_THAT(doppler.err, ContainsSubstring("3002"));

    CHECK(cli("calibrate --config /nonexistent/x.cfg").code == 2);
}

TEST_CASE("calibrate prints the Gamma quantile", "[cli]")
{
    const Run r = cli("calibrate --set detector.p_fa=0.05");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "r_tot,noise_var,p_fa,delta_prime");
    int rank = 0;
    double noise = 0, p = 0, delta = 0;
    char c1, c2, c3;
    std::istringstream fields(row);
    fields >> rank >> c1 >> noise >> c2 >> p >> c3 >> delta;
    CHECK(rank == 64);
    CHECK(p == 0.05);
    CHECK(delta == Approx(noise * boost::math::gamma_q_inv(64.0, 0.05)).epsilon(1e-12));
}

TEST_CASE("case3 output is byte-identical across runs and thread counts", "[cli]")
{
    const fs::path a = fresh_dir("cfisac_cli_a"), b = fresh_dir("cfisac_cli_b");
    REQUIRE(cli("case3 --seed 7 --trials 6 --out-dir \"" + a.string() + "\"").code == 0);
    REQUIRE(cli("case3 --seed 7 --trials 6 --threads 3 --out-dir \"" + b.string() + "\"").code == 0);
    const std::string x = slurp(a / "case3_snr.csv"), y = slurp(b / "case3_snr.csv");
    CHECK(!x.empty());
    CHECK(x == y);
    CHECK(x.rfind("# seed=7\n# config_hash=", 0) == 0);
    CHECK(x.find('\r') == std::string::npos);
    CHECK_THAT(x, ContainsSubstring("\ntrial,nc,gamma_db\n"));
}

TEST_CASE("detect prints one outcome row", "[cli]")
{
    const Run r = cli("detect --seed 3 --set estimator.method=grad_ri");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.rfind("seed,statistic,threshold,target_detected", 0) == 0);
    CHECK(row.rfind("3,", 0) == 0);
    CHECK_FALSE(std::getline(in, extra));
}

TEST_CASE("case1 and case2 write their files", "[cli]")
{
    const fs::path d = fresh_dir("cfisac_cli_c12");
    const std::string common = " --seed 2 --trials 2 --out-dir \"" + d.string() +
                               "\" --set estimator.grid_points=3 --set estimator.pso_iterations=3";
    REQUIRE(cli("case1" + common).code == 0);
    REQUIRE(cli("case2" + common).code == 0);
    CHECK(fs::exists(d / "case1_timing.csv"));
    CHECK(fs::exists(d / "case1_errors.csv"));
    CHECK(fs::exists(d / "case2_snr.csv"));
    CHECK_THAT(slurp(d / "case1_errors.csv"),
               ContainsSubstring("trial,method,ex,ey,ez,ex_speednorm,ey_speednorm,ez_speednorm\n"));
}
