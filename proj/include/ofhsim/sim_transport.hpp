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

#include "ofhsim/capture.hpp"
#include "ofhsim/scenario.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

namespace ofhsim {

/// Samples one-way delays from a link_model; nullopt means the frame is dropped.
class fronthaul_link
{
public:
    explicit fronthaul_link(link_model model);

    std::optional<usec> sample();
    const link_model&   model() const { return model_; }

private:
    link_model      model_;
    std::mt19937_64 rng_;
    std::size_t     next_ = 0;
};

/// Ordering slot for events that share a timestamp. Frames due at a boundary instant are handled before it.
enum class event_phase : std::uint8_t {
    du_boundary = 0,
    frame       = 1,
    ru_boundary = 2,
    air         = 3,
    pool_wake   = 4,
};

/// Deterministic discrete-event queue over integer microseconds.
class event_queue
{
public:
    using action = std::function<void()>;

    void schedule(usec at, event_phase phase, action fn);
    /// Runs events in (at, phase, insertion) order until the queue is empty. `after_each` runs after every event.
    void run(const std::function<void(usec)>& after_each = {});

    usec        now() const { return now_; }
    std::size_t executed() const { return executed_; }

private:
    struct event {
        usec          at{0};
        event_phase   phase = event_phase::frame;
        std::uint64_t seq   = 0;
        action        fn;
    };
    struct later {
        bool operator()(const event& a, const event& b) const
        {
            if (a.at != b.at) {
                return a.at > b.at;
            }
            if (a.phase != b.phase) {
                return a.phase > b.phase;
            }
            return a.seq > b.seq;
        }
    };

    std::priority_queue<event, std::vector<event>, later> heap_;
    std::uint64_t                                         next_seq_ = 0;
    usec                                                  now_{0};
    std::size_t                                           executed_ = 0;
};

struct integrity_report {
    std::uint64_t dl_slots_checked      = 0;
    std::uint64_t dl_failures           = 0;
    std::uint64_t silent_slots_checked  = 0;
    std::uint64_t silent_failures       = 0;
    std::uint64_t ul_sections_expected  = 0;
    std::uint64_t ul_sections_received  = 0;
    std::uint64_t ul_failures           = 0;
    std::uint64_t prach_symbols_expected = 0;
    std::uint64_t prach_symbols_received = 0;
    std::uint64_t prach_failures         = 0;
    std::uint64_t prach_tone_hits        = 0;
    double        dl_max_error           = 0.0;
    double        ul_max_error           = 0.0;

    bool passed() const
    {
        return dl_failures == 0 && silent_failures == 0 && ul_failures == 0 && prach_failures == 0 &&
               ul_sections_received == ul_sections_expected && prach_symbols_received == prach_symbols_expected &&
               prach_tone_hits == prach_symbols_expected;
    }
};

struct link_stats {
    std::uint64_t cplane_dl_dropped = 0;
    std::uint64_t cplane_ul_dropped = 0;
    std::uint64_t uplane_dl_dropped = 0;
    std::uint64_t uplane_ul_dropped = 0;
    std::optional<usec> dl_min_delay;
    std::optional<usec> dl_max_delay;
    std::optional<usec> ul_min_delay;
    std::optional<usec> ul_max_delay;
};

struct ta3_audit {
    std::uint64_t frames     = 0;
    std::uint64_t violations = 0;
};

struct run_result {
    ru_counters                              ru;
    du_counters                              du;
    capture_file                             capture;
    std::vector<std::string>                 log;
    integrity_report                         integrity;
    link_stats                               link;
    ta3_audit                                ta3;
    std::map<std::int64_t, ru_slot_activity> ru_activity;
    std::vector<slot_plan>                   du_plans;
    /// Slots whose RU activity (DL modulated, UL emitted, PRACH emitted) differs from the DU schedule.
    std::uint64_t                            direction_mismatches = 0;
    std::uint64_t                            events_executed      = 0;
};

/// Runs a scenario end to end. Throws scenario_error before any event runs if the scenario is inconsistent.
run_result run(const scenario& sc);

/// Re-feeds the DU-to-RU frames of a capture into a fresh RU built from `cfg` and returns its counters.
ru_counters replay(const capture_file& capture, const ru_config& cfg);

} // namespace ofhsim
