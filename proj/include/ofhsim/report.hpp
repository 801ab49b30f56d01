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

#pragma once

#include "ofhsim/sim_transport.hpp"

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace ofhsim {

struct report_row {
    std::string entity;
    std::string stream;
    std::string counter;
    std::string value;
};

/// One row per counter; the first line of the CSV form is the header "entity,stream,counter,value".
std::vector<report_row> build_report(const scenario& sc, const run_result& r);
std::string             to_csv(const std::vector<report_row>& rows);

struct run_verdict {
    bool                     clean = true;
    std::vector<std::string> reasons;
};

/// Clean means no window/context/decode drops, no link loss, all integrity and audit checks passed.
run_verdict assess(const run_result& r);

struct stream_key {
    capture_direction direction = capture_direction::du_to_ru;
    ofh_plane         plane     = ofh_plane::control;
    data_direction    data_dir  = data_direction::downlink;
    std::uint16_t     eaxc      = 0;

    friend auto operator<=>(const stream_key&, const stream_key&) = default;
};

struct stream_summary {
    std::uint64_t frames     = 0;
    std::uint64_t gaps       = 0;
    std::uint64_t duplicates = 0;
};

struct capture_analysis {
    std::uint64_t                        du_to_ru_frames = 0;
    std::uint64_t                        ru_to_du_frames = 0;
    ru_counters                          ru;
    std::uint64_t                        ul_on_time       = 0;
    std::uint64_t                        ul_early         = 0;
    std::uint64_t                        ul_late          = 0;
    std::uint64_t                        ul_decode_errors = 0;
    std::map<stream_key, stream_summary> streams;
};

/// Classifies every captured frame: DU-to-RU frames through a replayed RU with `ru_cfg`, RU-to-DU frames against
/// the Ta4 window of `du_profile`. Pure function of its inputs.
capture_analysis analyze_capture(const capture_file& capture, const ru_config& ru_cfg,
                                 const du_delay_profile& du_profile);
std::string      format_analysis(const capture_analysis& a);

std::string format_ru_profile(const ru_delay_profile& p);
std::string format_du_profile(const du_delay_profile& p);
std::string format_findings(const std::vector<profile_finding>& findings);

} // namespace ofhsim
