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

#include "ofhsim/timing.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ofhsim {

class profile_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// RU reception (T2a) and transmission (Ta3) windows, relative to the slot's OTA start.
struct ru_delay_profile {
    usec t2a_max_cp_dl{0};
    usec t2a_min_cp_dl{0};
    usec t2a_max_cp_ul{0};
    usec t2a_min_cp_ul{0};
    usec t2a_max_up{0};
    usec t2a_min_up{0};
    usec ta3_max{0};
    usec ta3_min{0};

    void validate() const;
    friend bool operator==(const ru_delay_profile&, const ru_delay_profile&) = default;
};

/// DU transmission (T1a) and reception (Ta4) windows, relative to the slot's OTA start.
struct du_delay_profile {
    usec t1a_max_cp_dl{0};
    usec t1a_min_cp_dl{0};
    usec t1a_max_cp_ul{0};
    usec t1a_min_cp_ul{0};
    usec t1a_max_up{0};
    usec t1a_min_up{0};
    usec ta4_max{0};
    usec ta4_min{0};

    void validate() const;
    friend bool operator==(const du_delay_profile&, const du_delay_profile&) = default;
};

struct fronthaul_delay {
    usec t12_min{0};
    usec t12_max{0};
    usec t34_min{0};
    usec t34_max{0};

    void validate() const;
};

enum class profile_preset { tdd_scs30, fdd_scs15 };

enum class window_kind { cplane_dl, cplane_ul, uplane_dl, uplane_ul_tx, uplane_ul_rx };

enum class window_verdict { early, on_time, late };

/// Closed interval of offsets relative to OTA. For the before-OTA kinds the interval is [ota - max, ota - min].
struct timing_window {
    usec min{0};
    usec max{0};
    bool before_ota = true;
};

profile_preset   parse_preset(std::string_view name);
std::string_view to_string(profile_preset p);
std::string_view to_string(window_kind k);
std::string_view to_string(window_verdict v);

ru_delay_profile ru_preset(profile_preset p);
du_delay_profile du_preset(profile_preset p);

/// Parameters for deriving RU windows from processing budgets counted in slots.
struct ru_derivation {
    unsigned lowphy_lead_slots  = 3;
    unsigned ofh_proc_slots_max = 2;
    unsigned ofh_proc_slots_min = 1;
    unsigned ulproc_slots_max   = 2;
    unsigned ulproc_slots_min   = 2;
    usec     slot_duration{500};
    /// Sub-slot adjustment applied to both U-plane bounds (may be negative).
    usec up_margin{0};
    /// Extra lead of the C-plane windows over the U-plane windows.
    usec cp_advance{125};
    /// Slack added on top of ulproc_slots_max for Ta3 max.
    usec ul_margin{0};
};

ru_delay_profile derive_ru_profile(const ru_derivation& d);
du_delay_profile derive_du_profile(const ru_delay_profile& ru, const fronthaul_delay& fh);

timing_window window_for(window_kind kind, const ru_delay_profile& ru);
timing_window window_for(window_kind kind, const du_delay_profile& du);

window_verdict check_window(usec event_time, usec ota_time, const timing_window& w);

template <typename Profile>
window_verdict check_window(window_kind kind, usec event_time, usec ota_time, const Profile& profile)
{
    return check_window(event_time, ota_time, window_for(kind, profile));
}

struct profile_finding {
    enum class severity { ok, warning };

    std::string field;
    severity    level = severity::ok;
    /// Signed excess in microseconds (0 when ok).
    std::int64_t excess_us = 0;
    std::string  detail;
};

/// Audits a DU profile against the RU profile it talks to over the given fronthaul. Never throws.
std::vector<profile_finding> validate_pair(const ru_delay_profile& ru, const du_delay_profile& du, const fronthaul_delay& fh);

} // namespace ofhsim
