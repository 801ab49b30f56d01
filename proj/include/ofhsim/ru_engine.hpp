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
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace ofhsim {

/// Raised on misuse of the engine's callback contract (a programming error, never a traffic condition).
class ru_engine_fault : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// Static RU configuration. There is deliberately no TDD pattern here: the per-slot direction is taken from the
/// C-plane messages that arrive.
struct ru_config {
    numerology_config numerology = numerology_config::make(30, 23'040'000, 51);
    ru_delay_profile  profile    = ru_preset(profile_preset::tdd_scs30);
    eaxc_layout       layout;
    unsigned          nof_ports         = 2;
    unsigned          lowphy_lead_slots = 3;
    /// UL U-plane transmit instant after OTA; defaults to the middle of the Ta3 window.
    std::optional<usec> ta3_tx_point;
    /// Context repository depth in slots; 0 derives it from the deepest T2a window.
    unsigned      repository_capacity = 0;
    slot_timebase timebase            = slot_timebase::for_numerology(numerology, usec{5000});
    /// Absolute slot of the first on_slot_boundary call.
    std::int64_t first_slot = -3;
    unsigned     prach_length_ra = 139;

    usec     effective_ta3_tx_point() const;
    unsigned effective_capacity() const;
    void     validate() const;
};

struct reception_counters {
    std::uint64_t on_time            = 0;
    std::uint64_t early_dropped      = 0;
    std::uint64_t late_dropped       = 0;
    std::uint64_t no_context_dropped = 0;
    std::uint64_t decode_error       = 0;

    std::uint64_t total() const { return on_time + early_dropped + late_dropped + no_context_dropped + decode_error; }
    friend bool operator==(const reception_counters&, const reception_counters&) = default;
};

struct ru_counters {
    reception_counters cplane_dl;
    reception_counters cplane_ul;
    reception_counters uplane_dl;
    /// Frames that could not be attributed to a stream (undecodable or wrong plane/direction).
    reception_counters unclassified;

    std::uint64_t dl_slots_modulated      = 0;
    std::uint64_t dl_slots_silent         = 0;
    std::uint64_t ul_slots_emitted        = 0;
    std::uint64_t prach_occasions_emitted = 0;
    std::uint64_t ul_frames_enqueued      = 0;
    std::uint64_t rg_acquired             = 0;
    std::uint64_t rg_released             = 0;

    std::uint64_t frames_received() const
    {
        return cplane_dl.total() + cplane_ul.total() + uplane_dl.total() + unclassified.total();
    }
    bool same_reception(const ru_counters& o) const
    {
        return cplane_dl == o.cplane_dl && cplane_ul == o.cplane_ul && uplane_dl == o.uplane_dl &&
               unclassified == o.unclassified;
    }
};

/// What the engine did for one absolute slot.
struct ru_slot_activity {
    bool dl_modulated  = false;
    bool ul_emitted    = false;
    bool prach_emitted = false;
};

struct pool_frame {
    usec                      transmit_at{0};
    std::uint64_t             order = 0;
    std::int64_t              absolute_slot = 0;
    usec                      ota{0};
    bool                      prach = false;
    std::vector<std::uint8_t> bytes;
};

/// UL/PRACH U-plane frames awaiting their Ta3 transmit instant.
class frame_pool
{
public:
    void push(pool_frame f);
    /// Removes and returns every frame with transmit_at <= now, in (transmit_at, insertion) order.
    std::vector<pool_frame>      drain(usec now);
    std::optional<usec>          next_due() const;
    std::size_t                  size() const { return heap_.size(); }
    bool                         empty() const { return heap_.empty(); }

private:
    struct later {
        bool operator()(const pool_frame& a, const pool_frame& b) const
        {
            return a.transmit_at != b.transmit_at ? a.transmit_at > b.transmit_at : a.order > b.order;
        }
    };
    std::priority_queue<pool_frame, std::vector<pool_frame>, later> heap_;
    std::uint64_t                                                   next_order_ = 0;
};

struct ru_slot_output {
    /// Absolute slot the DL blocks are for (current slot + lead).
    std::int64_t              dl_absolute_slot = 0;
    bool                      dl_from_context  = false;
    std::vector<sample_block> dl;
};

class ru_engine
{
public:
    explicit ru_engine(ru_config cfg);

    void on_frame(std::span<const std::uint8_t> bytes, usec arrival);

    /// Called once per slot, in order, at the start of `slot` (virtual time `now`). Modulates the slot that is
    /// lowphy_lead_slots ahead and turns the supplied UL sample blocks (of slots that have fully elapsed) into
    /// U-plane frames in the frame pool.
    ru_slot_output on_slot_boundary(const slot_point& slot, usec now, std::span<const sample_block> ul_samples);

    std::vector<pool_frame> drain_frame_pool(usec now) { return pool_.drain(now); }
    std::optional<usec>     next_pool_due() const { return pool_.next_due(); }

    ru_counters snapshot_counters() const { return counters_; }

    const ru_config&                                 config() const { return cfg_; }
    const std::map<std::int64_t, ru_slot_activity>& activity() const { return activity_; }
    std::int64_t                                     current_slot() const { return current_; }
    std::size_t                                      rg_in_use() const;

private:
    struct section_alloc {
        std::uint16_t section_id   = 0;
        std::uint16_t start_prb    = 0;
        std::uint16_t num_prb_wire = 0;
        unsigned      num_prb      = 0;
        unsigned      start_symbol = 0;
        unsigned      num_symbol   = 0;
    };
    struct dl_context {
        std::int64_t                            slot = 0;
        std::vector<std::vector<section_alloc>> per_port;
        std::size_t                             rg = 0;
    };
    struct ul_context {
        std::int64_t                            slot = 0;
        std::vector<std::vector<section_alloc>> per_port;
        comp_params                             comp;
    };
    struct prach_alloc {
        section_alloc section;
        int           freq_offset_halfscs = 0;
    };
    struct prach_context {
        std::int64_t                            slot = 0;
        std::vector<std::optional<prach_alloc>> per_port;
        comp_params                             comp;
    };

    /// Fixed-capacity lookup table keyed by absolute slot modulo capacity.
    template <typename T>
    class repository
    {
    public:
        explicit repository(std::size_t capacity) : entries_(capacity) {}
        T*                        find(std::int64_t slot);
        std::optional<T>&         bucket(std::int64_t slot);
        std::vector<std::optional<T>>& entries() { return entries_; }

    private:
        std::vector<std::optional<T>> entries_;
    };

    reception_counters& stream(data_direction dir, ofh_plane plane);
    void handle_cplane(const decoded_cplane& f, usec arrival);
    void handle_uplane(const decoded_uplane& f, usec arrival);
    void release_rg(std::size_t rg);
    void reclaim_stale();
    void emit_uplink(const sample_block& block);
    std::uint8_t next_seq(unsigned port);

    ru_config                   cfg_;
    codec_config                codec_;
    usec                        ta3_tx_point_;
    ofdm_processor              ofdm_;
    repository<dl_context>      dl_repo_;
    repository<ul_context>      ul_repo_;
    repository<prach_context>   prach_repo_;
    std::vector<resource_grid>  rg_pool_;
    std::vector<std::size_t>    rg_free_;
    frame_pool                  pool_;
    ru_counters                 counters_;
    std::map<std::int64_t, ru_slot_activity> activity_;
    std::vector<std::uint8_t>   ul_seq_;
    std::int64_t                current_;
    bool                        started_ = false;
};

/// Fixed-point conversion used at the RU's float/IQ boundary: scale 2^15, round to nearest, saturate.
std::int16_t to_fixed(double v);
double       from_fixed(std::int16_t v);

} // namespace ofhsim
