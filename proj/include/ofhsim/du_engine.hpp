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

#include "ofhsim/delay_profile.hpp"
#include "ofhsim/low_phy.hpp"
#include "ofhsim/ofh_codec.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ofhsim {

class du_config_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

enum class slot_kind : std::uint8_t { downlink, special, uplink };

/// TDD slot pattern. Special slots are downlink at slot granularity.
class tdd_pattern
{
public:
    tdd_pattern() = default;
    explicit tdd_pattern(std::vector<slot_kind> kinds);

    /// Accepts D/S/U letters, e.g. "DDDSU" or "DDDDDDDSUU".
    static tdd_pattern parse(std::string_view text);

    std::size_t period() const { return kinds_.size(); }
    slot_kind   kind_at(std::int64_t absolute_slot) const;
    bool        has_downlink(std::int64_t absolute_slot) const { return kind_at(absolute_slot) != slot_kind::uplink; }
    bool        has_uplink(std::int64_t absolute_slot) const { return kind_at(absolute_slot) == slot_kind::uplink; }
    std::string to_string() const;

private:
    std::vector<slot_kind> kinds_;
};

/// Contiguous PRB run [start, start + count).
struct prb_range {
    unsigned start = 0;
    unsigned count = 0;

    friend bool operator==(const prb_range&, const prb_range&) = default;
};

/// PRACH occasion placement for short format B4 (139 subcarriers at the data SCS).
struct prach_config {
    bool         enabled      = true;
    unsigned     config_index = 159;
    unsigned     period_frames = 1;
    unsigned     subframe      = 9;
    /// Slot within the subframe; the last slot of the subframe at the carrier numerology.
    unsigned     slot_in_subframe = 1;
    unsigned     start_symbol     = 0;
    unsigned     nof_symbols      = 12;
    int          freq_offset_halfscs = -612;
    unsigned     length_ra           = 139;

    /// Known indices: 159 (unpaired spectrum) and 213 (paired spectrum), both format B4, subframe 9 of every frame.
    static prach_config from_index(unsigned index, unsigned mu, int freq_offset_halfscs);

    bool is_occasion(const slot_point& slot) const;
    /// PRBs touched by the PRACH band on a carrier of nof_prb PRBs.
    prb_range prbs(unsigned nof_prb) const;
};

/// Offset that places the PRACH band at PRB 0.
int default_prach_freq_offset(unsigned nof_prb);

struct ul_grant {
    std::vector<prb_range> ranges;
    unsigned               start_symbol = 0;
    unsigned               nof_symbols  = NOF_SYMBOLS_PER_SLOT;
};

struct du_config {
    numerology_config numerology = numerology_config::make(30, 23'040'000, 51);
    du_delay_profile  profile    = du_preset(profile_preset::tdd_scs30);
    unsigned          scheduling_offset_slots = 10;
    usec              tcp_adv_dl{125};
    /// Emission instants before OTA; default to the window midpoints (floored).
    std::optional<usec> t1a_cp_dl_point;
    std::optional<usec> t1a_cp_ul_point;
    std::optional<usec> t1a_up_point;
    prach_config        prach;
    /// Empty means FDD.
    std::optional<tdd_pattern> tdd;
    comp_params                comp;
    eaxc_layout                layout;
    unsigned                   nof_ports = 2;
    std::uint64_t              seed      = 1;
    slot_timebase              timebase  = slot_timebase::for_numerology(numerology, usec{5000});

    usec cp_dl_point() const;
    usec cp_ul_point() const;
    usec up_point() const;
    void validate() const;
};

struct du_emission {
    usec                      emit_at{0};
    std::int64_t              absolute_slot = 0;
    window_kind               kind          = window_kind::cplane_dl;
    std::vector<std::uint8_t> bytes;
};

/// What a slot carries according to the DU's schedule.
struct slot_plan {
    std::int64_t            absolute_slot = 0;
    bool                    downlink      = false;
    bool                    uplink        = false;
    bool                    prach         = false;
    std::optional<ul_grant> grant;
};

struct slot_payload {
    const resource_grid*    dl = nullptr;
    std::optional<ul_grant> ul;
    bool                    prach = false;
};

struct uplink_delivery {
    std::int64_t      absolute_slot = 0;
    unsigned          port          = 0;
    unsigned          symbol        = 0;
    bool              prach         = false;
    std::uint16_t     section_id    = 0;
    unsigned          start_prb     = 0;
    std::vector<cf_t> values;
    usec              arrival{0};
};

struct du_counters {
    std::uint64_t ul_on_time       = 0;
    std::uint64_t ul_early         = 0;
    std::uint64_t ul_late          = 0;
    std::uint64_t ul_seq_gaps      = 0;
    std::uint64_t ul_duplicates    = 0;
    std::uint64_t ul_decode_errors = 0;
    std::uint64_t ul_prach_frames  = 0;

    std::uint64_t dl_slots_scheduled        = 0;
    std::uint64_t ul_slots_scheduled        = 0;
    std::uint64_t prach_occasions_scheduled = 0;
    std::uint64_t cplane_dl_sent            = 0;
    std::uint64_t cplane_ul_sent            = 0;
    std::uint64_t uplane_dl_sent            = 0;

    std::uint64_t lambda_count = 0;
    std::int64_t  lambda_min_us = 0;
    std::int64_t  lambda_max_us = 0;
    std::int64_t  lambda_sum_us = 0;

    double lambda_mean_us() const
    {
        return lambda_count == 0 ? 0.0 : static_cast<double>(lambda_sum_us) / static_cast<double>(lambda_count);
    }
};

/// Seeded QPSK (amplitude `amplitude`) over the given PRB ranges of every symbol and port.
void fill_qpsk(resource_grid& grid, std::uint64_t seed, std::int64_t absolute_slot, std::uint64_t tag,
               std::span<const prb_range> ranges, double amplitude = 0.5);

class du_engine
{
public:
    using uplink_sink = std::function<void(const uplink_delivery&)>;

    explicit du_engine(du_config cfg);

    slot_plan plan(std::int64_t absolute_slot) const;

    /// Seeded synthetic DL content for a slot (all PRBs, all symbols, all ports).
    resource_grid dl_source_grid(std::int64_t absolute_slot) const;

    std::vector<du_emission> schedule_slot(std::int64_t absolute_slot, usec now, const slot_payload& payload);
    std::vector<du_emission> schedule_slot(const slot_point& slot, usec now, const slot_payload& payload);

    void on_uplink_frame(std::span<const std::uint8_t> bytes, usec arrival);
    void set_uplink_sink(uplink_sink sink) { sink_ = std::move(sink); }

    /// Expands the pattern over n_frames starting at absolute slot first_slot, with content from plan() and
    /// dl_source_grid().
    std::vector<du_emission> run_pattern(unsigned n_frames, std::int64_t first_slot = 0);

    du_counters       snapshot_counters() const { return counters_; }
    const du_config&  config() const { return cfg_; }
    usec              schedule_time(std::int64_t absolute_slot) const;

private:
    std::uint8_t next_seq(window_kind kind, unsigned port);

    du_config                 cfg_;
    codec_config              codec_;
    sequence_tracker          tracker_;
    du_counters               counters_;
    uplink_sink               sink_;
    std::vector<std::uint8_t> seq_cp_dl_;
    std::vector<std::uint8_t> seq_cp_ul_;
    std::vector<std::uint8_t> seq_up_dl_;
};

} // namespace ofhsim
