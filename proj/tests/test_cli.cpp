/*
 * Copyright 2026 The ofhsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Drives the ofhsim binary and checks exit codes and outputs.

#include "oracles.hpp"

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct outcome {
    int         code = -1;
    std::string out;
};

outcome cli(const std::string& args)
{
    const std::string cmd = std::string("\"") + OFHSIM_CLI + "\" " + args + " 2>/dev/null";
    FILE*             p   = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    outcome r;
    char    buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), p)) {
        r.out.append(buf, n);
    }
    const int status = ::pclose(p);
    r.code           = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct scratch {
    fs::path dir;

    scratch() : dir(fs::temp_directory_path() / ("ofhsim_cli_" + std::to_string(::getpid())))
    {
        fs::create_directories(dir);
    }
    ~scratch() { fs::remove_all(dir); }

    std::string write(const std::string& name, const std::string& text) const
    {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    }
};

const std::string scenarios = OFHSIM_SCENARIO_DIR;

const char* short_tdd = R"(
name: short
n_frames: 2
numerology: {scs_khz: 30, sampling_rate_hz: 23040000, nof_prb: 51}
duplex: {mode: tdd, pattern: DDDSU}
ru_profile: {preset: tdd_scs30}
du_profile: {preset: tdd_scs30}
)";

} // namespace

TEST_CASE("run: clean scenario exits 0 and writes outputs")
{
    scratch s;
    const auto cfg = s.write("a.scenario", short_tdd);
    const auto csv = (s.dir / "a.csv").string();
    const auto cap = (s.dir / "a.cap").string();
    const outcome r = cli("run " + cfg + " --out " + csv + " --capture " + cap + " -q");
    CHECK(r.code == 0);
    CHECK(fs::file_size(csv) > 0);
    CHECK(fs::file_size(cap) > 0);
    const auto text = oracle::read_file(csv);
    CHECK(std::string(text.begin(), text.begin() + 28) == "entity,stream,counter,value\n");

    const outcome a = cli("analyze " + cap + " --scenario " + cfg);
    CHECK(a.code == 0);
    CHECK(a.out.find("cplane_dl") != std::string::npos);

    const outcome stdout_run = cli("run " + cfg + " -q");
    CHECK(stdout_run.code == 0);
    CHECK(stdout_run.out == std::string(text.begin(), text.end()));
}

TEST_CASE("run: late drops exit 2")
{
    scratch s;
    const auto cfg = s.write("late.scenario", std::string(short_tdd).substr(0, std::string(short_tdd).find("ru_profile")) +
                                                  "ru_profile: {preset: tdd_scs30, overrides: {t2a_min_up: 2400}}\n"
                                                  "du_profile: {preset: tdd_scs30}\n");
    CHECK(cli("run " + cfg + " -q --out " + (s.dir / "late.csv").string()).code == 2);
}

TEST_CASE("run: bad input exits 1 without output")
{
    scratch s;
    const auto out = (s.dir / "never.csv").string();
    CHECK(cli("run " + s.write("bad.scenario", "name: [oops\n") + " --out " + out).code == 1);
    CHECK(cli("run " + s.write("key.scenario", std::string(short_tdd) + "colour: blue\n") + " --out " + out).code == 1);
    CHECK(cli("run " + s.write("lam.scenario", std::string(short_tdd) + "scheduling_offset_slots: 2\n") + " --out " + out).code == 1);
    CHECK(cli("run " + (s.dir / "missing.scenario").string() + " --out " + out).code == 1);
    CHECK_FALSE(fs::exists(out));
    CHECK(cli("").code == 1);
    CHECK(cli("frobnicate").code == 1);
    CHECK(cli("analyze " + s.write("junk.cap", "not a capture")).code == 1);
}

TEST_CASE("profile subcommands")
{
    const outcome show = cli("profile show fdd_scs15");
    CHECK(show.code == 0);
    CHECK(show.out.find("1480") != std::string::npos);

    const outcome v = cli("profile validate");
    CHECK(v.code == 0);
    CHECK(v.out.find("2 warning(s)") != std::string::npos);

    const outcome d0 = cli("profile derive --ru tdd_scs30");
    CHECK(d0.code == 0);
    CHECK(d0.out.find("2635") != std::string::npos);
    const outcome d = cli("profile derive --ru tdd_scs30 --t12-max 100 --t34-max 45");
    CHECK(d.out.find("2115") != std::string::npos);
    CHECK(d.out.find("1325") != std::string::npos);

    CHECK(cli("profile show tdd_scs60").code == 1);
    CHECK(cli("profile derive --ru tdd_scs30 --t12-min 50 --t12-max 10").code == 1);
}

TEST_CASE("bundled TDD scenario matches its committed report")
{
    const outcome r = cli("run " + scenarios + "/tdd_dddsu.scenario -q");
    CHECK(r.code == 0);
    const auto expected = oracle::read_file(scenarios + "/tdd_dddsu.expected.csv");
    CHECK(r.out == std::string(expected.begin(), expected.end()));
}
