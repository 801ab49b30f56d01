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

#include "ofhsim/delay_profile.hpp"

namespace ofhsim {

namespace {

void check_pair(const char* name, usec max, usec min, bool allow_negative = false)
{
    if (!allow_negative && (max.count() < 0 || min.count() < 0)) {
        throw profile_error(std::string(name) + " bounds must be non-negative");
    }
    if (max < min) {
        throw profile_error(std::string(name) + " window collapsed: max " + std::to_string(max.count()) + " < min " +
                            std::to_string(min.count()));
    }
}

} // namespace

void ru_delay_profile::validate() const
{
    check_pair("t2a_cp_dl", t2a_max_cp_dl, t2a_min_cp_dl);
    check_pair("t2a_cp_ul", t2a_max_cp_ul, t2a_min_cp_ul);
    check_pair("t2a_up", t2a_max_up, t2a_min_up);
    check_pair("ta3", ta3_max, ta3_min);
}

void du_delay_profile::validate() const
{
    check_pair("t1a_cp_dl", t1a_max_cp_dl, t1a_min_cp_dl, true);
    check_pair("t1a_cp_ul", t1a_max_cp_ul, t1a_min_cp_ul, true);
    check_pair("t1a_up", t1a_max_up, t1a_min_up, true);
    check_pair("ta4", ta4_max, ta4_min, true);
}

void fronthaul_delay::validate() const
{
    check_pair("t12", t12_max, t12_min);
    check_pair("t34", t34_max, t34_min);
}

profile_preset parse_preset(std::string_view name)
{
    if (name == "tdd_scs30") {
        return profile_preset::tdd_scs30;
    }
    if (name == "fdd_scs15") {
        return profile_preset::fdd_scs15;
    }
    throw profile_error("unknown delay profile preset '" + std::string(name) + "'");
}

std::string_view to_string(profile_preset p)
{
    return p == profile_preset::tdd_scs30 ? "tdd_scs30" : "fdd_scs15";
}

std::string_view to_string(window_kind k)
{
    switch (k) {
        case window_kind::cplane_dl:
            return "cplane_dl";
        case window_kind::cplane_ul:
            return "cplane_ul";
        case window_kind::uplane_dl:
            return "uplane_dl";
        case window_kind::uplane_ul_tx:
            return "uplane_ul_tx";
        case window_kind::uplane_ul_rx:
            return "uplane_ul_rx";
    }
    return "?";
}

std::string_view to_string(window_verdict v)
{
    switch (v) {
        case window_verdict::early:
            return "early";
        case window_verdict::on_time:
            return "on_time";
        case window_verdict::late:
            return "late";
    }
    return "?";
}

ru_delay_profile ru_preset(profile_preset p)
{
    switch (p) {
        case profile_preset::tdd_scs30:
            return {usec{2635}, usec{2221}, usec{2635}, usec{2221}, usec{2454}, usec{2015}, usec{1280}, usec{925}};
        case profile_preset::fdd_scs15:
            return {usec{4135}, usec{3721}, usec{4135}, usec{3721}, usec{3954}, usec{3515}, usec{1480}, usec{1125}};
    }
    throw profile_error("unknown preset");
}

du_delay_profile du_preset(profile_preset p)
{
    switch (p) {
        case profile_preset::tdd_scs30:
            return {usec{2635}, usec{2335}, usec{2670}, usec{2386}, usec{2460}, usec{2180}, usec{1325}, usec{925}};
        case profile_preset::fdd_scs15:
            return {usec{4135}, usec{3886}, usec{4135}, usec{3886}, usec{3990}, usec{3680}, usec{1500}, usec{1125}};
    }
    throw profile_error("unknown preset");
}

ru_delay_profile derive_ru_profile(const ru_derivation& d)
{
    if (d.slot_duration.count() <= 0) {
        throw profile_error("slot duration must be positive");
    }
    if (d.lowphy_lead_slots == 0 || d.ofh_proc_slots_max == 0 || d.ofh_proc_slots_min == 0 || d.ulproc_slots_max == 0 ||
        d.ulproc_slots_min == 0) {
        throw profile_error("slot counts must be positive");
    }
    if (d.ofh_proc_slots_min > d.ofh_proc_slots_max || d.ulproc_slots_min > d.ulproc_slots_max) {
        throw profile_error("processing slot range has min > max");
    }

    ru_delay_profile ru;
    ru.t2a_max_up    = d.slot_duration * (d.lowphy_lead_slots + d.ofh_proc_slots_max) + d.up_margin;
    ru.t2a_min_up    = d.slot_duration * (d.lowphy_lead_slots + d.ofh_proc_slots_min) + d.up_margin;
    ru.t2a_max_cp_dl = ru.t2a_max_up + d.cp_advance;
    ru.t2a_min_cp_dl = ru.t2a_min_up + d.cp_advance;
    ru.t2a_max_cp_ul = ru.t2a_max_cp_dl;
    ru.t2a_min_cp_ul = ru.t2a_min_cp_dl;
    ru.ta3_max       = d.slot_duration * d.ulproc_slots_max + d.ul_margin;
    ru.ta3_min       = d.slot_duration * d.ulproc_slots_min;
    ru.validate();
    return ru;
}

du_delay_profile derive_du_profile(const ru_delay_profile& ru, const fronthaul_delay& fh)
{
    fh.validate();
    du_delay_profile du;
    du.t1a_max_cp_dl = ru.t2a_max_cp_dl + fh.t12_min;
    du.t1a_min_cp_dl = ru.t2a_min_cp_dl + fh.t12_max;
    du.t1a_max_cp_ul = ru.t2a_max_cp_ul + fh.t12_min;
    du.t1a_min_cp_ul = ru.t2a_min_cp_ul + fh.t12_max;
    du.t1a_max_up    = ru.t2a_max_up + fh.t12_min;
    du.t1a_min_up    = ru.t2a_min_up + fh.t12_max;
    du.ta4_max       = ru.ta3_max + fh.t34_max;
    du.ta4_min       = ru.ta3_min + fh.t34_min;
    du.validate();
    return du;
}

timing_window window_for(window_kind kind, const ru_delay_profile& ru)
{
    switch (kind) {
        case window_kind::cplane_dl:
            return {ru.t2a_min_cp_dl, ru.t2a_max_cp_dl, true};
        case window_kind::cplane_ul:
            return {ru.t2a_min_cp_ul, ru.t2a_max_cp_ul, true};
        case window_kind::uplane_dl:
            return {ru.t2a_min_up, ru.t2a_max_up, true};
        case window_kind::uplane_ul_tx:
            return {ru.ta3_min, ru.ta3_max, false};
        case window_kind::uplane_ul_rx:
            break;
    }
    throw profile_error("RU profile has no " + std::string(to_string(kind)) + " window");
}

timing_window window_for(window_kind kind, const du_delay_profile& du)
{
    switch (kind) {
        case window_kind::cplane_dl:
            return {du.t1a_min_cp_dl, du.t1a_max_cp_dl, true};
        case window_kind::cplane_ul:
            return {du.t1a_min_cp_ul, du.t1a_max_cp_ul, true};
        case window_kind::uplane_dl:
            return {du.t1a_min_up, du.t1a_max_up, true};
        case window_kind::uplane_ul_rx:
            return {du.ta4_min, du.ta4_max, false};
        case window_kind::uplane_ul_tx:
            break;
    }
    throw profile_error("DU profile has no " + std::string(to_string(kind)) + " window");
}

window_verdict check_window(usec event_time, usec ota_time, const timing_window& w)
{
    const usec open  = w.before_ota ? ota_time - w.max : ota_time + w.min;
    const usec close = w.before_ota ? ota_time - w.min : ota_time + w.max;
    if (event_time < open) {
        return window_verdict::early;
    }
    if (event_time > close) {
        return window_verdict::late;
    }
    return window_verdict::on_time;
}

std::vector<profile_finding> validate_pair(const ru_delay_profile& ru, const du_delay_profile& du, const fronthaul_delay& fh)
{
    std::vector<profile_finding> findings;

    // A DU max bound above what the RU accepts after the fastest transport, or a DU min bound below what the RU
    // accepts after the slowest transport, lets an in-window emission land outside the RU window.
    auto check_max = [&](const char* field, usec du_value, usec limit) {
        const std::int64_t excess = (du_value - limit).count();
        if (excess > 0) {
            findings.push_back({field, profile_finding::severity::warning, excess,
                                std::string(field) + " " + std::to_string(du_value.count()) + " exceeds " +
                                    std::to_string(limit.count())});
        } else {
            findings.push_back({field, profile_finding::severity::ok, 0, {}});
        }
    };
    auto check_min = [&](const char* field, usec du_value, usec limit) {
        const std::int64_t excess = (limit - du_value).count();
        if (excess > 0) {
            findings.push_back({field, profile_finding::severity::warning, excess,
                                std::string(field) + " " + std::to_string(du_value.count()) + " below " +
                                    std::to_string(limit.count())});
        } else {
            findings.push_back({field, profile_finding::severity::ok, 0, {}});
        }
    };

    check_max("t1a_max_cp_dl", du.t1a_max_cp_dl, ru.t2a_max_cp_dl + fh.t12_min);
    check_min("t1a_min_cp_dl", du.t1a_min_cp_dl, ru.t2a_min_cp_dl + fh.t12_max);
    check_max("t1a_max_cp_ul", du.t1a_max_cp_ul, ru.t2a_max_cp_ul + fh.t12_min);
    check_min("t1a_min_cp_ul", du.t1a_min_cp_ul, ru.t2a_min_cp_ul + fh.t12_max);
    check_max("t1a_max_up", du.t1a_max_up, ru.t2a_max_up + fh.t12_min);
    check_min("t1a_min_up", du.t1a_min_up, ru.t2a_min_up + fh.t12_max);
    // The DU receive window must contain every RU emission shifted by any T34 realisation.
    check_min("ta4_max", du.ta4_max, ru.ta3_max + fh.t34_max);
    check_max("ta4_min", du.ta4_min, ru.ta3_min + fh.t34_min);
    return findings;
}

} // namespace ofhsim
