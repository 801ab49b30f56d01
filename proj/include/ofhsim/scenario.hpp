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

#include "ofhsim/du_engine.hpp"
#include "ofhsim/ru_engine.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofhsim {

/// Malformed scenario text (syntax, unknown key, wrong type).
class scenario_parse_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed scenario whose values are inconsistent.
class scenario_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

enum class jitter_kind { none, uniform, sequence };

struct link_model {
    usec                 base_delay{0};
    jitter_kind          jitter = jitter_kind::none;
    /// Uniform jitter bounds, added to base_delay.
    usec                 jitter_lo{0};
    usec                 jitter_hi{0};
    /// Cyclic jitter values, added to base_delay.
    std::vector<usec>    sequence;
    double               drop_rate = 0.0;
    std::uint64_t        seed      = 1;

    /// base = lo; uniform jitter spans [0, hi - lo] unless kind is none.
    static link_model from_bounds(usec lo, usec hi, jitter_kind kind, std::uint64_t seed);

    usec min_delay() const;
    usec max_delay() const;
    void validate() const;
};

struct scenario {
    std::string                name = "scenario";
    numerology_config          numerology = numerology_config::make(30, 23'040'000, 51);
    /// Empty means FDD.
    std::optional<tdd_pattern> tdd = tdd_pattern::parse("DDDSU");
    ru_delay_profile           ru_profile = ru_preset(profile_preset::tdd_scs30);
    du_delay_profile           du_profile = du_preset(profile_preset::tdd_scs30);
    fronthaul_delay            fh;
    jitter_kind                jitter = jitter_kind::none;
    std::vector<usec>          jitter_sequence;
    double                     drop_rate = 0.0;
    std::uint64_t              link_seed = 1;
    comp_params                comp;
    unsigned                   scheduling_offset_slots = 10;
    usec                       tcp_adv_dl{125};
    std::optional<usec>        t1a_cp_dl_point;
    std::optional<usec>        t1a_cp_ul_point;
    std::optional<usec>        t1a_up_point;
    prach_config               prach = prach_config::from_index(159, 1, default_prach_freq_offset(51));
    /// PRACH bin (from the band start) carrying the virtual UE's test tone.
    unsigned                   prach_tone_bin = 7;
    unsigned                   n_frames       = 1;
    unsigned                   nof_ports      = 2;
    unsigned                   lowphy_lead_slots = 3;
    std::optional<usec>        ta3_tx_point;
    std::uint64_t              seed = 1;
    /// RU clock minus DU clock.
    usec                       ru_clock_offset{0};
    /// Extra one-way delay applied only to DL U-plane frames.
    usec                       uplane_dl_extra_delay{0};
    bool                       check_integrity = true;

    std::int64_t  nof_slots() const;
    usec          t0() const;
    slot_timebase timebase() const;
    link_model    dl_link() const;
    link_model    ul_link() const;
    ru_config     make_ru_config() const;
    du_config     make_du_config() const;

    /// Cross-checks every parameter; throws scenario_error with the offending key.
    void validate() const;
};

/// Bundled defaults per duplex mode: TDD DDDSU at 30 kHz / 51 PRBs, FDD at 15 kHz / 106 PRBs.
scenario default_tdd_scenario();
scenario default_fdd_scenario();

scenario parse_scenario(const std::string& text);
scenario load_scenario(const std::string& path);

} // namespace ofhsim
