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

#include "ofhsim/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ofhsim {

link_model link_model::from_bounds(usec lo, usec hi, jitter_kind kind, std::uint64_t seed)
{
    link_model m;
    m.base_delay = lo;
    m.seed       = seed;
    if (kind == jitter_kind::uniform) {
        m.jitter    = jitter_kind::uniform;
        m.jitter_lo = usec{0};
        m.jitter_hi = hi - lo;
    }
    return m;
}

usec link_model::min_delay() const
{
    switch (jitter) {
        case jitter_kind::uniform:
            return base_delay + jitter_lo;
        case jitter_kind::sequence:
            return base_delay + *std::min_element(sequence.begin(), sequence.end());
        case jitter_kind::none:
            break;
    }
    return base_delay;
}

usec link_model::max_delay() const
{
    switch (jitter) {
        case jitter_kind::uniform:
            return base_delay + jitter_hi;
        case jitter_kind::sequence:
            return base_delay + *std::max_element(sequence.begin(), sequence.end());
        case jitter_kind::none:
            break;
    }
    return base_delay;
}

void link_model::validate() const
{
    if (jitter == jitter_kind::uniform && jitter_hi < jitter_lo) {
        throw scenario_error("uniform jitter upper bound below lower bound");
    }
    if (jitter == jitter_kind::sequence && sequence.empty()) {
        throw scenario_error("sequence jitter needs at least one value");
    }
    if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) {
        throw scenario_error("drop_rate must lie in [0, 1]");
    }
    if (min_delay() < usec{0}) {
        throw scenario_error("link delay may not be negative");
    }
}

std::int64_t scenario::nof_slots() const
{
    return static_cast<std::int64_t>(n_frames) * NOF_SUBFRAMES_PER_FRAME * numerology.slots_per_subframe();
}

usec scenario::t0() const
{
    const usec slot   = numerology.slot_duration();
    const auto lead   = std::max<std::int64_t>(scheduling_offset_slots, lowphy_lead_slots);
    const auto offset = std::max<std::int64_t>(ru_clock_offset.count(), 0);
    return slot * (lead + (offset + slot.count() - 1) / slot.count());
}

slot_timebase scenario::timebase() const
{
    return slot_timebase::for_numerology(numerology, t0());
}

link_model scenario::dl_link() const
{
    link_model m = link_model::from_bounds(fh.t12_min, fh.t12_max, jitter, link_seed);
    if (jitter == jitter_kind::sequence) {
        m.jitter   = jitter_kind::sequence;
        m.sequence = jitter_sequence;
    }
    m.drop_rate = drop_rate;
    return m;
}

link_model scenario::ul_link() const
{
    link_model m = link_model::from_bounds(fh.t34_min, fh.t34_max, jitter, link_seed ^ 0x5553'4c49'4e4bULL);
    if (jitter == jitter_kind::sequence) {
        m.jitter   = jitter_kind::sequence;
        m.sequence = jitter_sequence;
    }
    m.drop_rate = drop_rate;
    return m;
}

ru_config scenario::make_ru_config() const
{
    ru_config c;
    c.numerology        = numerology;
    c.profile           = ru_profile;
    c.nof_ports         = nof_ports;
    c.lowphy_lead_slots = lowphy_lead_slots;
    c.ta3_tx_point      = ta3_tx_point;
    c.timebase          = timebase();
    c.first_slot        = -static_cast<std::int64_t>(lowphy_lead_slots);
    c.prach_length_ra   = prach.length_ra;
    return c;
}

du_config scenario::make_du_config() const
{
    du_config c;
    c.numerology              = numerology;
    c.profile                 = du_profile;
    c.scheduling_offset_slots = scheduling_offset_slots;
    c.tcp_adv_dl              = tcp_adv_dl;
    c.t1a_cp_dl_point         = t1a_cp_dl_point;
    c.t1a_cp_ul_point         = t1a_cp_ul_point;
    c.t1a_up_point            = t1a_up_point;
    c.prach                   = prach;
    c.tdd                     = tdd;
    c.comp                    = comp;
    c.nof_ports               = nof_ports;
    c.seed                    = seed;
    c.timebase                = timebase();
    return c;
}

void scenario::validate() const
{
    auto wrap = [](const char* what, auto&& fn) {
        try {
            fn();
        } catch (const scenario_error&) {
            throw;
        } catch (const std::exception& e) {
            throw scenario_error(std::string(what) + ": " + e.what());
        }
    };
    if (n_frames == 0) {
        throw scenario_error("n_frames: must be at least 1");
    }
    wrap("numerology", [&] { numerology.validate(); });
    wrap("comp", [&] { comp.validate(); });
    wrap("fronthaul", [&] {
        fh.validate();
        dl_link().validate();
        ul_link().validate();
    });
    if (uplane_dl_extra_delay < usec{0}) {
        throw scenario_error("fronthaul.uplane_dl_extra_delay_us: may not be negative");
    }
    if (prach.enabled && prach_tone_bin >= prach.length_ra) {
        throw scenario_error("prach.tone_bin: must be below " + std::to_string(prach.length_ra));
    }
    wrap("ru", [&] { make_ru_config().validate(); });
    wrap("du", [&] { make_du_config().validate(); });
}

scenario default_tdd_scenario()
{
    return scenario{};
}

scenario default_fdd_scenario()
{
    scenario s;
    s.name                    = "fdd";
    s.numerology              = numerology_config::make(15, 23'040'000, 106);
    s.tdd                     = std::nullopt;
    s.ru_profile              = ru_preset(profile_preset::fdd_scs15);
    s.du_profile              = du_preset(profile_preset::fdd_scs15);
    s.scheduling_offset_slots = 5;
    s.prach                   = prach_config::from_index(213, 0, default_prach_freq_offset(106));
    return s;
}

namespace {

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!node.IsMap()) {
        throw scenario_parse_error("'" + where + "' must be a mapping");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (ok.count(key) == 0) {
            throw scenario_parse_error("unknown key '" + key + "' in '" + where + "'");
        }
    }
}

template <typename T>
T get(const YAML::Node& node, const std::string& path)
{
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw scenario_parse_error("'" + path + "' has the wrong type");
    }
}

template <typename T>
void read(const YAML::Node& parent, const char* key, const std::string& where, T& out)
{
    if (const YAML::Node n = parent[key]) {
        out = get<T>(n, where.empty() ? key : where + "." + key);
    }
}

void read_us(const YAML::Node& parent, const char* key, const std::string& where, usec& out)
{
    std::int64_t v = out.count();
    read(parent, key, where, v);
    out = usec{v};
}

void read_opt_us(const YAML::Node& parent, const char* key, const std::string& where, std::optional<usec>& out)
{
    if (parent[key]) {
        std::int64_t v = 0;
        read(parent, key, where, v);
        out = usec{v};
    }
}

const char* const RU_FIELDS[] = {"t2a_max_cp_dl", "t2a_min_cp_dl", "t2a_max_cp_ul", "t2a_min_cp_ul",
                                 "t2a_max_up",    "t2a_min_up",    "ta3_max",       "ta3_min"};
const char* const DU_FIELDS[] = {"t1a_max_cp_dl", "t1a_min_cp_dl", "t1a_max_cp_ul", "t1a_min_cp_ul",
                                 "t1a_max_up",    "t1a_min_up",    "ta4_max",       "ta4_min"};

void apply_overrides(const YAML::Node& n, const std::string& where, usec* fields[8], const char* const names[8])
{
    if (!n.IsMap()) {
        throw scenario_parse_error("'" + where + "' must be a mapping");
    }
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        const auto it  = std::find_if(names, names + 8, [&](const char* f) { return key == f; });
        if (it == names + 8) {
            throw scenario_parse_error("unknown key '" + key + "' in '" + where + "'");
        }
        *fields[it - names] = usec{get<std::int64_t>(kv.second, where + "." + key)};
    }
}

profile_preset preset_of(const YAML::Node& n, const std::string& path)
{
    const auto name = get<std::string>(n, path);
    try {
        return parse_preset(name);
    } catch (const std::exception&) {
        throw scenario_parse_error("'" + path + "': unknown preset '" + name + "'");
    }
}

} // namespace

scenario parse_scenario(const std::string& text)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw scenario_parse_error(std::string("YAML syntax: ") + e.what());
    }
    if (!root.IsMap()) {
        throw scenario_parse_error("scenario must be a mapping");
    }
    check_keys(root, "<root>",
               {"name", "seed", "n_frames", "ports", "numerology", "duplex", "ru_profile", "du_profile", "fronthaul",
                "comp", "scheduling_offset_slots", "tcp_adv_dl_us", "du", "prach", "ru", "check_integrity"});

    bool fdd = false;
    std::string pattern;
    if (const auto d = root["duplex"]) {
        check_keys(d, "duplex", {"mode", "pattern"});
        std::string mode = "tdd";
        read(d, "mode", "duplex", mode);
        if (mode != "tdd" && mode != "fdd") {
            throw scenario_parse_error("'duplex.mode' must be tdd or fdd");
        }
        fdd = mode == "fdd";
        read(d, "pattern", "duplex", pattern);
        if (fdd && !pattern.empty()) {
            throw scenario_parse_error("'duplex.pattern' is only valid for tdd");
        }
    }
    scenario s = fdd ? default_fdd_scenario() : default_tdd_scenario();
    if (!pattern.empty()) {
        try {
            s.tdd = tdd_pattern::parse(pattern);
        } catch (const std::exception& e) {
            throw scenario_parse_error(std::string("'duplex.pattern': ") + e.what());
        }
    }

    read(root, "name", "", s.name);
    read(root, "seed", "", s.seed);
    read(root, "n_frames", "", s.n_frames);
    read(root, "ports", "", s.nof_ports);
    read(root, "scheduling_offset_slots", "", s.scheduling_offset_slots);
    read_us(root, "tcp_adv_dl_us", "", s.tcp_adv_dl);
    read(root, "check_integrity", "", s.check_integrity);

    bool prb_changed = false;
    if (const auto n = root["numerology"]) {
        check_keys(n, "numerology", {"scs_khz", "sampling_rate_hz", "nof_prb"});
        unsigned      scs  = s.numerology.scs_khz;
        std::uint64_t rate = s.numerology.sampling_rate_hz;
        unsigned      nprb = s.numerology.nof_prb;
        read(n, "scs_khz", "numerology", scs);
        read(n, "sampling_rate_hz", "numerology", rate);
        read(n, "nof_prb", "numerology", nprb);
        prb_changed = nprb != s.numerology.nof_prb;
        try {
            s.numerology = numerology_config::make(scs, rate, nprb);
        } catch (const std::exception& e) {
            throw scenario_error(std::string("numerology: ") + e.what());
        }
    }

    if (const auto r = root["ru_profile"]) {
        check_keys(r, "ru_profile", {"preset", "overrides"});
        if (r["preset"]) {
            s.ru_profile = ru_preset(preset_of(r["preset"], "ru_profile.preset"));
        }
        if (r["overrides"]) {
            auto&  p   = s.ru_profile;
            usec*  f[] = {&p.t2a_max_cp_dl, &p.t2a_min_cp_dl, &p.t2a_max_cp_ul, &p.t2a_min_cp_ul,
                          &p.t2a_max_up,    &p.t2a_min_up,    &p.ta3_max,       &p.ta3_min};
            apply_overrides(r["overrides"], "ru_profile.overrides", f, RU_FIELDS);
        }
    }

    if (const auto f = root["fronthaul"]) {
        check_keys(f, "fronthaul",
                   {"t12_min", "t12_max", "t34_min", "t34_max", "jitter", "jitter_sequence_us", "drop_rate", "seed",
                    "uplane_dl_extra_delay_us"});
        read_us(f, "t12_min", "fronthaul", s.fh.t12_min);
        read_us(f, "t12_max", "fronthaul", s.fh.t12_max);
        read_us(f, "t34_min", "fronthaul", s.fh.t34_min);
        read_us(f, "t34_max", "fronthaul", s.fh.t34_max);
        std::string j = "none";
        read(f, "jitter", "fronthaul", j);
        if (j == "none") {
            s.jitter = jitter_kind::none;
        } else if (j == "uniform") {
            s.jitter = jitter_kind::uniform;
        } else if (j == "sequence") {
            s.jitter = jitter_kind::sequence;
        } else {
            throw scenario_parse_error("'fronthaul.jitter' must be none, uniform or sequence");
        }
        std::vector<std::int64_t> seq;
        read(f, "jitter_sequence_us", "fronthaul", seq);
        s.jitter_sequence.clear();
        for (std::int64_t v : seq) {
            s.jitter_sequence.emplace_back(v);
        }
        read(f, "drop_rate", "fronthaul", s.drop_rate);
        read(f, "seed", "fronthaul", s.link_seed);
        read_us(f, "uplane_dl_extra_delay_us", "fronthaul", s.uplane_dl_extra_delay);
    }

    if (const auto d = root["du_profile"]) {
        check_keys(d, "du_profile", {"preset", "derive", "overrides"});
        bool derive = false;
        read(d, "derive", "du_profile", derive);
        if (derive && d["preset"]) {
            throw scenario_parse_error("'du_profile' takes either preset or derive, not both");
        }
        if (derive) {
            try {
                s.du_profile = derive_du_profile(s.ru_profile, s.fh);
            } catch (const std::exception& e) {
                throw scenario_error(std::string("du_profile.derive: ") + e.what());
            }
        } else if (d["preset"]) {
            s.du_profile = du_preset(preset_of(d["preset"], "du_profile.preset"));
        }
        if (d["overrides"]) {
            auto& p   = s.du_profile;
            usec* f[] = {&p.t1a_max_cp_dl, &p.t1a_min_cp_dl, &p.t1a_max_cp_ul, &p.t1a_min_cp_ul,
                         &p.t1a_max_up,    &p.t1a_min_up,    &p.ta4_max,       &p.ta4_min};
            apply_overrides(d["overrides"], "du_profile.overrides", f, DU_FIELDS);
        }
    }

    if (const auto c = root["comp"]) {
        check_keys(c, "comp", {"meth", "width"});
        std::string meth = "bfp";
        read(c, "meth", "comp", meth);
        if (meth == "bfp") {
            s.comp.meth = comp_method::bfp;
        } else if (meth == "none") {
            s.comp.meth  = comp_method::none;
            s.comp.width = 16;
        } else {
            throw scenario_parse_error("'comp.meth' must be bfp or none");
        }
        read(c, "width", "comp", s.comp.width);
    }

    if (const auto d = root["du"]) {
        check_keys(d, "du", {"t1a_cp_dl_point_us", "t1a_cp_ul_point_us", "t1a_up_point_us"});
        read_opt_us(d, "t1a_cp_dl_point_us", "du", s.t1a_cp_dl_point);
        read_opt_us(d, "t1a_cp_ul_point_us", "du", s.t1a_cp_ul_point);
        read_opt_us(d, "t1a_up_point_us", "du", s.t1a_up_point);
    }

    if (const auto r = root["ru"]) {
        check_keys(r, "ru", {"lowphy_lead_slots", "ta3_tx_point_us", "clock_offset_us"});
        read(r, "lowphy_lead_slots", "ru", s.lowphy_lead_slots);
        read_opt_us(r, "ta3_tx_point_us", "ru", s.ta3_tx_point);
        read_us(r, "clock_offset_us", "ru", s.ru_clock_offset);
    }

    {
        bool     enabled = true;
        unsigned index   = s.prach.config_index;
        int      fo      = prb_changed ? default_prach_freq_offset(s.numerology.nof_prb) : s.prach.freq_offset_halfscs;
        if (const auto p = root["prach"]) {
            check_keys(p, "prach", {"enabled", "index", "freq_offset", "tone_bin"});
            read(p, "enabled", "prach", enabled);
            read(p, "index", "prach", index);
            read(p, "freq_offset", "prach", fo);
            read(p, "tone_bin", "prach", s.prach_tone_bin);
        }
        try {
            s.prach = prach_config::from_index(index, s.numerology.mu, fo);
        } catch (const std::exception& e) {
            throw scenario_error(std::string("prach.index: ") + e.what());
        }
        s.prach.enabled = enabled;
    }
    return s;
}

scenario load_scenario(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw scenario_parse_error("cannot open scenario '" + path + "'");
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_scenario(ss.str());
}

} // namespace ofhsim
