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

// ofhsim: scenario runner, capture analyzer and delay-profile tools.
//
// Exit codes: 0 clean run, 1 configuration or input error, 2 drops or failed integrity checks.

#include "ofhsim/report.hpp"
#include "ofhsim/udp_link.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace ofhsim;

constexpr int EXIT_CLEAN  = 0;
constexpr int EXIT_CONFIG = 1;
constexpr int EXIT_DROPS  = 2;

std::string output_path(const std::string& p)
{
    const char* dir = std::getenv("OFHSIM_OUT_DIR");
    if (dir == nullptr || *dir == '\0' || std::filesystem::path(p).is_absolute()) {
        return p;
    }
    return (std::filesystem::path(dir) / p).string();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os || !(os << text)) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
}

struct run_args {
    std::string                  config;
    std::string                  out;
    std::string                  capture;
    std::optional<std::uint64_t> seed;
    bool                         quiet = false;
};

int cmd_run(const run_args& a)
{
    scenario sc;
    try {
        sc = load_scenario(a.config);
    } catch (const scenario_parse_error& e) {
        std::cerr << "ofhsim: parse error: " << e.what() << "\n";
        return EXIT_CONFIG;
    } catch (const scenario_error& e) {
        std::cerr << "ofhsim: invalid scenario: " << e.what() << "\n";
        return EXIT_CONFIG;
    }
    if (a.seed) {
        sc.seed = *a.seed;
    }
    try {
        sc.validate();
    } catch (const scenario_error& e) {
        std::cerr << "ofhsim: invalid scenario: " << e.what() << "\n";
        return EXIT_CONFIG;
    }

    run_result r;
    try {
        r = run(sc);
    } catch (const std::logic_error& e) {
        std::cerr << "ofhsim: internal assertion failed: " << e.what() << "\n";
        return EXIT_CONFIG;
    }

    const std::string csv = to_csv(build_report(sc, r));
    if (a.out.empty()) {
        std::cout << csv;
    } else {
        write_text(output_path(a.out), csv);
    }
    if (!a.capture.empty()) {
        r.capture.save(output_path(a.capture));
    }

    const run_verdict v = assess(r);
    if (!a.quiet) {
        for (const auto& line : r.log) {
            std::cerr << line << "\n";
        }
    }
    if (!v.clean) {
        for (const auto& reason : v.reasons) {
            std::cerr << "ofhsim: run failed: " << reason << "\n";
        }
        return EXIT_DROPS;
    }
    return EXIT_CLEAN;
}

int cmd_analyze(const std::string& capture_path, const std::string& scenario_path, const std::string& profile)
{
    scenario sc = default_tdd_scenario();
    try {
        if (!scenario_path.empty()) {
            sc = load_scenario(scenario_path);
        }
        if (!profile.empty()) {
            const profile_preset p = parse_preset(profile);
            sc.ru_profile          = ru_preset(p);
            sc.du_profile          = du_preset(p);
        }
    } catch (const std::exception& e) {
        std::cerr << "ofhsim: " << e.what() << "\n";
        return EXIT_CONFIG;
    }
    try {
        const capture_file c = capture_file::load(capture_path);
        std::cout << format_analysis(analyze_capture(c, sc.make_ru_config(), sc.du_profile));
    } catch (const capture_error& e) {
        std::cerr << "ofhsim: corrupt capture: " << e.what() << "\n";
        return EXIT_CONFIG;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ofhsim: " << e.what() << "\n";
        return EXIT_CONFIG;
    }
    return EXIT_CLEAN;
}

struct fh_args {
    std::int64_t t12_min = 0;
    std::int64_t t12_max = 0;
    std::int64_t t34_min = 0;
    std::int64_t t34_max = 0;

    fronthaul_delay get() const { return {usec{t12_min}, usec{t12_max}, usec{t34_min}, usec{t34_max}}; }
};

void add_fh_options(CLI::App* app, fh_args& fh)
{
    app->add_option("--t12-min", fh.t12_min, "Minimum DU-to-RU transport delay (us)");
    app->add_option("--t12-max", fh.t12_max, "Maximum DU-to-RU transport delay (us)");
    app->add_option("--t34-min", fh.t34_min, "Minimum RU-to-DU transport delay (us)");
    app->add_option("--t34-max", fh.t34_max, "Maximum RU-to-DU transport delay (us)");
}

int cmd_live(const std::string& config, unsigned slots, const std::string& capture)
{
    scenario sc;
    try {
        sc = load_scenario(config);
        sc.validate();
    } catch (const std::exception& e) {
        std::cerr << "ofhsim: " << e.what() << "\n";
        return EXIT_CONFIG;
    }
    live_options opt;
    opt.n_slots = slots;
    live_result r;
    try {
        r = run_live(sc, opt);
    } catch (const udp_error& e) {
        std::cerr << "ofhsim: socket error: " << e.what() << "\n";
        return EXIT_CONFIG;
    }
    if (!capture.empty()) {
        r.capture.save(output_path(capture));
    }
    std::cout << "datagrams sent " << r.datagrams_sent << ", received " << r.datagrams_received << "\n"
              << "ru on_time: cplane_dl " << r.ru.cplane_dl.on_time << ", cplane_ul " << r.ru.cplane_ul.on_time
              << ", uplane_dl " << r.ru.uplane_dl.on_time << "\n"
              << "ru late: " << r.ru.cplane_dl.late_dropped + r.ru.cplane_ul.late_dropped + r.ru.uplane_dl.late_dropped
              << ", du ul on_time " << r.du.ul_on_time << ", late " << r.du.ul_late << "\n";
    return EXIT_CLEAN;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Open Fronthaul split-7.2 DU/RU simulator"};
    app.require_subcommand(1);

    run_args ra;
    auto*    run_cmd = app.add_subcommand("run", "Run a scenario and write the CSV report");
    run_cmd->add_option("config", ra.config, "Scenario file")->required();
    run_cmd->add_option("--out", ra.out, "CSV report path (stdout when omitted)");
    run_cmd->add_option("--capture", ra.capture, "Write a frame capture to this path");
    run_cmd->add_option("--seed", ra.seed, "Override the scenario seed");
    run_cmd->add_flag("-q,--quiet", ra.quiet, "Suppress the run log");

    std::string capture_path;
    std::string scenario_path;
    std::string analyze_profile;
    auto*       analyze_cmd = app.add_subcommand("analyze", "Classify every frame of a capture");
    analyze_cmd->add_option("capture", capture_path, "Capture file")->required();
    analyze_cmd->add_option("--scenario", scenario_path, "Scenario the capture came from (carrier and timebase)");
    analyze_cmd->add_option("--profile", analyze_profile, "Delay profile preset to classify against");

    auto* profile_cmd = app.add_subcommand("profile", "Delay profile tools");
    profile_cmd->require_subcommand(1);
    std::string show_preset;
    auto*       show_cmd = profile_cmd->add_subcommand("show", "Print a preset's RU and DU windows");
    show_cmd->add_option("preset", show_preset, "tdd_scs30 or fdd_scs15")->required();

    std::string derive_ru = "tdd_scs30";
    fh_args     derive_fh;
    auto*       derive_cmd = profile_cmd->add_subcommand("derive", "Derive the DU profile from an RU preset");
    derive_cmd->add_option("--ru", derive_ru, "RU preset");
    add_fh_options(derive_cmd, derive_fh);

    std::string validate_ru = "tdd_scs30";
    std::string validate_du = "tdd_scs30";
    fh_args     validate_fh;
    auto*       validate_cmd = profile_cmd->add_subcommand("validate", "Audit a DU profile against an RU profile");
    validate_cmd->add_option("--ru", validate_ru, "RU preset");
    validate_cmd->add_option("--du", validate_du, "DU preset");
    add_fh_options(validate_cmd, validate_fh);

    std::string live_config;
    std::string live_capture;
    unsigned    live_slots = 20;
    auto*       live_cmd   = app.add_subcommand("live", "Exchange frames over UDP loopback in real time");
    live_cmd->add_option("config", live_config, "Scenario file")->required();
    live_cmd->add_option("--slots", live_slots, "Number of slots to schedule");
    live_cmd->add_option("--capture", live_capture, "Write a frame capture to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? EXIT_CLEAN : EXIT_CONFIG;
    }

    try {
        if (*run_cmd) {
            return cmd_run(ra);
        }
        if (*analyze_cmd) {
            return cmd_analyze(capture_path, scenario_path, analyze_profile);
        }
        if (*live_cmd) {
            return cmd_live(live_config, live_slots, live_capture);
        }
        if (*show_cmd) {
            const profile_preset p = parse_preset(show_preset);
            std::cout << "RU (" << show_preset << ")\n"
                      << format_ru_profile(ru_preset(p)) << "\nDU (" << show_preset << ")\n"
                      << format_du_profile(du_preset(p));
        } else if (*derive_cmd) {
            std::cout << format_du_profile(derive_du_profile(ru_preset(parse_preset(derive_ru)), derive_fh.get()));
        } else if (*validate_cmd) {
            std::cout << format_findings(validate_pair(ru_preset(parse_preset(validate_ru)),
                                                       du_preset(parse_preset(validate_du)), validate_fh.get()));
        }
    } catch (const std::exception& e) {
        std::cerr << "ofhsim: " << e.what() << "\n";
        return EXIT_CONFIG;
    }
    return EXIT_CLEAN;
}
