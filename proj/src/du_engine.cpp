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

#include "ofhsim/du_engine.hpp"

#include "ofhsim/ru_engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ofhsim {

namespace {

constexpr std::uint16_t DL_SECTION_ID    = 1;
constexpr std::uint16_t UL_SECTION_BASE  = 0x100;
constexpr std::uint16_t PRACH_SECTION_ID = 0x200;

constexpr std::uint64_t TAG_DL = 0x444c;

std::int64_t positive_mod(std::int64_t a, std::int64_t m)
{
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

app_header header_for(const slot_point& sp, data_direction dir)
{
    app_header h;
    h.direction   = dir;
    h.frame_id    = static_cast<std::uint8_t>(sp.sfn() % 256);
    h.subframe_id = static_cast<std::uint8_t>(sp.subframe_index());
    h.slot_id     = static_cast<std::uint8_t>(sp.slot_index());
    return h;
}

std::uint16_t wire_num_prb(unsigned n)
{
    return n > 255 ? 0 : static_cast<std::uint16_t>(n);
}

du_config validated(du_config cfg)
{
    cfg.validate();
    return cfg;
}

} // namespace

tdd_pattern::tdd_pattern(std::vector<slot_kind> kinds) : kinds_(std::move(kinds))
{
    if (kinds_.empty()) {
        throw du_config_error("TDD pattern is empty");
    }
}

tdd_pattern tdd_pattern::parse(std::string_view text)
{
    std::vector<slot_kind> kinds;
    for (char c : text) {
        switch (c) {
            case 'D':
            case 'd':
                kinds.push_back(slot_kind::downlink);
                break;
            case 'S':
            case 's':
                kinds.push_back(slot_kind::special);
                break;
            case 'U':
            case 'u':
                kinds.push_back(slot_kind::uplink);
                break;
            default:
                throw du_config_error("TDD pattern '" + std::string(text) + "' contains '" + std::string(1, c) +
                                      "', expected D, S or U");
        }
    }
    return tdd_pattern(std::move(kinds));
}

slot_kind tdd_pattern::kind_at(std::int64_t absolute_slot) const
{
    return kinds_[static_cast<std::size_t>(positive_mod(absolute_slot, static_cast<std::int64_t>(kinds_.size())))];
}

std::string tdd_pattern::to_string() const
{
    std::string s;
    for (slot_kind k : kinds_) {
        s += k == slot_kind::downlink ? 'D' : k == slot_kind::special ? 'S' : 'U';
    }
    return s;
}

prach_config prach_config::from_index(unsigned index, unsigned mu, int freq_offset_halfscs)
{
    if (index != 159 && index != 213) {
        throw du_config_error("PRACH configuration index " + std::to_string(index) +
                              " is not supported (known: 159, 213)");
    }
    prach_config p;
    p.config_index        = index;
    p.period_frames       = 1;
    p.subframe            = 9;
    p.slot_in_subframe    = (1U << mu) - 1;
    p.start_symbol        = 0;
    p.nof_symbols         = 12;
    p.length_ra           = 139;
    p.freq_offset_halfscs = freq_offset_halfscs;
    return p;
}

bool prach_config::is_occasion(const slot_point& slot) const
{
    return enabled && slot.sfn() % period_frames == 0 && slot.subframe_index() == subframe &&
           slot.slot_index() == slot_in_subframe;
}

prb_range prach_config::prbs(unsigned nof_prb) const
{
    const int k0 = prach_start_subcarrier(freq_offset_halfscs) + static_cast<int>(nof_prb * NOF_SUBCARRIERS_PER_PRB / 2);
    const int k1 = k0 + static_cast<int>(length_ra) - 1;
    if (k0 < 0 || k1 >= static_cast<int>(nof_prb * NOF_SUBCARRIERS_PER_PRB)) {
        throw du_config_error("PRACH band lies outside the carrier");
    }
    const unsigned first = static_cast<unsigned>(k0) / NOF_SUBCARRIERS_PER_PRB;
    const unsigned last  = static_cast<unsigned>(k1) / NOF_SUBCARRIERS_PER_PRB;
    return {first, last - first + 1};
}

int default_prach_freq_offset(unsigned nof_prb)
{
    return -static_cast<int>(nof_prb * NOF_SUBCARRIERS_PER_PRB);
}

usec du_config::cp_dl_point() const
{
    return t1a_cp_dl_point ? *t1a_cp_dl_point : profile.t1a_min_cp_dl + (profile.t1a_max_cp_dl - profile.t1a_min_cp_dl) / 2;
}

usec du_config::cp_ul_point() const
{
    return t1a_cp_ul_point ? *t1a_cp_ul_point : profile.t1a_min_cp_ul + (profile.t1a_max_cp_ul - profile.t1a_min_cp_ul) / 2;
}

usec du_config::up_point() const
{
    return t1a_up_point ? *t1a_up_point : profile.t1a_min_up + (profile.t1a_max_up - profile.t1a_min_up) / 2;
}

void du_config::validate() const
{
    numerology.validate();
    profile.validate();
    layout.validate();
    comp.validate();
    if (nof_ports == 0 || nof_ports > (1U << layout.ru_port_bits)) {
        throw du_config_error("nof_ports " + std::to_string(nof_ports) + " does not fit the eAxC ru_port field");
    }
    const usec lead = numerology.slot_duration() * scheduling_offset_slots;
    const usec deepest = std::max({profile.t1a_max_cp_dl, profile.t1a_max_cp_ul, profile.t1a_max_up});
    if (lead < deepest) {
        throw du_config_error("scheduling offset of " + std::to_string(scheduling_offset_slots) + " slots (" +
                              std::to_string(lead.count()) + " us) is shorter than the " +
                              std::to_string(deepest.count()) + " us T1a window");
    }
    auto inside = [](usec p, usec lo, usec hi, const char* what) {
        if (p < lo || p > hi) {
            throw du_config_error(std::string(what) + " emission point " + std::to_string(p.count()) +
                                  " us outside [" + std::to_string(lo.count()) + ", " + std::to_string(hi.count()) +
                                  "]");
        }
    };
    inside(cp_dl_point(), profile.t1a_min_cp_dl, profile.t1a_max_cp_dl, "C-plane DL");
    inside(cp_ul_point(), profile.t1a_min_cp_ul, profile.t1a_max_cp_ul, "C-plane UL");
    inside(up_point(), profile.t1a_min_up, profile.t1a_max_up, "U-plane DL");
    if (tcp_adv_dl < usec{0}) {
        throw du_config_error("tcp_adv_dl must not be negative");
    }
    if (cp_dl_point() - up_point() < tcp_adv_dl) {
        throw du_config_error("C-plane DL leads U-plane by " + std::to_string((cp_dl_point() - up_point()).count()) +
                              " us, less than tcp_adv_dl " + std::to_string(tcp_adv_dl.count()) + " us");
    }
    if (timebase.mu != numerology.mu || timebase.slot_duration != numerology.slot_duration()) {
        throw du_config_error("timebase does not match the numerology");
    }
    if (prach.enabled) {
        if (prach.period_frames == 0 || prach.slot_in_subframe >= numerology.slots_per_subframe()) {
            throw du_config_error("PRACH occasion does not exist at this numerology");
        }
        if (prach.start_symbol + prach.nof_symbols > NOF_SYMBOLS_PER_SLOT || prach.nof_symbols == 0) {
            throw du_config_error("PRACH symbols exceed the slot");
        }
        prach.prbs(numerology.nof_prb);
        if (tdd) {
            const std::int64_t span =
                static_cast<std::int64_t>(tdd->period()) * NOF_SUBFRAMES_PER_FRAME * numerology.slots_per_subframe() *
                prach.period_frames;
            for (std::int64_t s = 0; s != span; ++s) {
                if (prach.is_occasion(slot_point::from_absolute(numerology.mu, s)) && !tdd->has_uplink(s)) {
                    throw du_config_error("PRACH occasion falls on a non-uplink slot of pattern " + tdd->to_string());
                }
            }
        }
    }
}

void fill_qpsk(resource_grid& grid, std::uint64_t seed, std::int64_t absolute_slot, std::uint64_t tag,
               std::span<const prb_range> ranges, double amplitude)
{
    const auto    abs_bits = static_cast<std::uint64_t>(absolute_slot);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(abs_bits), static_cast<std::uint32_t>(abs_bits >> 32),
                      static_cast<std::uint32_t>(tag)};
    std::mt19937_64 rng(seq);
    const double    a = amplitude / std::sqrt(2.0);
    for (unsigned port = 0; port != grid.nof_ports(); ++port) {
        for (unsigned sym = 0; sym != NOF_SYMBOLS_PER_SLOT; ++sym) {
            for (const prb_range& r : ranges) {
                std::vector<cf_t> values(static_cast<std::size_t>(r.count) * NOF_SUBCARRIERS_PER_PRB);
                std::uint64_t     bits = 0;
                for (std::size_t i = 0; i != values.size(); ++i) {
                    if (i % 32 == 0) {
                        bits = rng();
                    }
                    values[i] = {(bits & 1U) ? -a : a, (bits & 2U) ? -a : a};
                    bits >>= 2;
                }
                grid.write_prbs(sym, port, r.start, values);
            }
        }
    }
}

du_engine::du_engine(du_config cfg) :
    cfg_(validated(std::move(cfg))),
    codec_{cfg_.numerology.mu, cfg_.numerology.nof_prb, cfg_.layout},
    seq_cp_dl_(cfg_.nof_ports, 0),
    seq_cp_ul_(cfg_.nof_ports, 0),
    seq_up_dl_(cfg_.nof_ports, 0)
{
}

usec du_engine::schedule_time(std::int64_t absolute_slot) const
{
    return cfg_.timebase.ota_time(absolute_slot) - cfg_.numerology.slot_duration() * cfg_.scheduling_offset_slots;
}

slot_plan du_engine::plan(std::int64_t absolute_slot) const
{
    slot_plan p;
    p.absolute_slot = absolute_slot;
    p.downlink      = !cfg_.tdd || cfg_.tdd->has_downlink(absolute_slot);
    p.uplink        = !cfg_.tdd || cfg_.tdd->has_uplink(absolute_slot);
    p.prach         = p.uplink && cfg_.prach.is_occasion(cfg_.timebase.point(absolute_slot));
    if (p.uplink) {
        ul_grant g;
        const unsigned n = cfg_.numerology.nof_prb;
        if (p.prach) {
            const prb_range pr = cfg_.prach.prbs(n);
            if (pr.start > 0) {
                g.ranges.push_back({0, pr.start});
            }
            if (pr.start + pr.count < n) {
                g.ranges.push_back({pr.start + pr.count, n - pr.start - pr.count});
            }
        } else {
            g.ranges.push_back({0, n});
        }
        p.grant = std::move(g);
    }
    return p;
}

resource_grid du_engine::dl_source_grid(std::int64_t absolute_slot) const
{
    resource_grid   grid(cfg_.timebase.point(absolute_slot), cfg_.nof_ports, cfg_.numerology.nof_prb);
    const prb_range all{0, cfg_.numerology.nof_prb};
    fill_qpsk(grid, cfg_.seed, absolute_slot, TAG_DL, std::span(&all, 1));
    return grid;
}

std::uint8_t du_engine::next_seq(window_kind kind, unsigned port)
{
    switch (kind) {
        case window_kind::cplane_dl:
            return seq_cp_dl_[port]++;
        case window_kind::cplane_ul:
            return seq_cp_ul_[port]++;
        default:
            return seq_up_dl_[port]++;
    }
}

std::vector<du_emission> du_engine::schedule_slot(const slot_point& slot, usec now, const slot_payload& payload)
{
    const std::int64_t abs = cfg_.timebase.slot_at(now) + cfg_.scheduling_offset_slots;
    if (cfg_.timebase.point(abs) != slot) {
        throw du_config_error("slot " + std::to_string(slot.system_slot()) + " is not due for scheduling at " +
                              std::to_string(now.count()) + " us");
    }
    return schedule_slot(abs, now, payload);
}

std::vector<du_emission> du_engine::schedule_slot(std::int64_t absolute_slot, usec now, const slot_payload& payload)
{
    if (now != schedule_time(absolute_slot)) {
        throw du_config_error("slot " + std::to_string(absolute_slot) + " must be scheduled at " +
                              std::to_string(schedule_time(absolute_slot).count()) + " us, not " +
                              std::to_string(now.count()) + " us");
    }
    const slot_plan pl = plan(absolute_slot);
    if ((payload.dl != nullptr) != pl.downlink || payload.ul.has_value() != pl.uplink || payload.prach != pl.prach) {
        throw du_config_error("payload for slot " + std::to_string(absolute_slot) +
                              " does not match the slot's direction in the pattern");
    }

    const usec       ota = cfg_.timebase.ota_time(absolute_slot);
    const slot_point sp  = cfg_.timebase.point(absolute_slot);
    const unsigned   nprb = cfg_.numerology.nof_prb;
    std::vector<du_emission> out;

    auto emit = [&](window_kind kind, usec at, std::vector<std::uint8_t> bytes) {
        if (check_window(kind, at, ota, cfg_.profile) != window_verdict::on_time) {
            throw du_config_error("emission at " + std::to_string((ota - at).count()) + " us before OTA is outside the " +
                                  std::string(to_string(kind)) + " window");
        }
        out.push_back({at, absolute_slot, kind, std::move(bytes)});
    };

    if (pl.downlink) {
        const resource_grid& grid = *payload.dl;
        if (grid.nof_prb() != nprb || grid.nof_ports() < cfg_.nof_ports) {
            throw du_config_error("DL grid does not match the carrier");
        }
        for (unsigned port = 0; port != cfg_.nof_ports; ++port) {
            const eaxc_id eaxc{0, 0, 0, static_cast<std::uint8_t>(port)};
            cplane_message c;
            c.app          = header_for(sp, data_direction::downlink);
            c.section_type = 1;
            c.comp         = cfg_.comp;
            cplane_section s;
            s.section_id = DL_SECTION_ID;
            s.start_prb  = 0;
            s.num_prb    = wire_num_prb(nprb);
            s.num_symbol = NOF_SYMBOLS_PER_SLOT;
            c.sections.push_back(s);
            emit(window_kind::cplane_dl, ota - cfg_.cp_dl_point(),
                 encode_cplane(c, eaxc, next_seq(window_kind::cplane_dl, port), codec_));
            counters_.cplane_dl_sent++;
        }
        for (unsigned port = 0; port != cfg_.nof_ports; ++port) {
            const eaxc_id eaxc{0, 0, 0, static_cast<std::uint8_t>(port)};
            for (unsigned sym = 0; sym != NOF_SYMBOLS_PER_SLOT; ++sym) {
                uplane_message u;
                u.app                 = header_for(sp, data_direction::downlink);
                u.app.start_symbol_id = static_cast<std::uint8_t>(sym);
                uplane_section s;
                s.section_id = DL_SECTION_ID;
                s.start_prb  = 0;
                s.num_prb    = wire_num_prb(nprb);
                s.comp       = cfg_.comp;
                const auto re = grid.symbol(sym, port);
                for (unsigned p = 0; p != nprb; ++p) {
                    iq_block iq;
                    for (unsigned k = 0; k != NOF_SUBCARRIERS_PER_PRB; ++k) {
                        const cf_t v  = re[p * NOF_SUBCARRIERS_PER_PRB + k];
                        iq[2 * k]     = to_fixed(v.real());
                        iq[2 * k + 1] = to_fixed(v.imag());
                    }
                    s.prbs.push_back(compress(iq, cfg_.comp));
                }
                u.sections.push_back(std::move(s));
                emit(window_kind::uplane_dl, ota - cfg_.up_point(),
                     encode_uplane(u, eaxc, next_seq(window_kind::uplane_dl, port), codec_));
                counters_.uplane_dl_sent++;
            }
        }
        counters_.dl_slots_scheduled++;
    }

    if (pl.uplink) {
        const ul_grant& g = *payload.ul;
        for (unsigned port = 0; port != cfg_.nof_ports; ++port) {
            const eaxc_id eaxc{0, 0, 0, static_cast<std::uint8_t>(port)};
            cplane_message c;
            c.app                 = header_for(sp, data_direction::uplink);
            c.app.start_symbol_id = static_cast<std::uint8_t>(g.start_symbol);
            c.section_type        = 1;
            c.comp                = cfg_.comp;
            for (std::size_t i = 0; i != g.ranges.size(); ++i) {
                cplane_section s;
                s.section_id = static_cast<std::uint16_t>(UL_SECTION_BASE + i);
                s.start_prb  = static_cast<std::uint16_t>(g.ranges[i].start);
                s.num_prb    = wire_num_prb(g.ranges[i].count);
                s.num_symbol = static_cast<std::uint8_t>(g.nof_symbols);
                c.sections.push_back(s);
            }
            if (!c.sections.empty()) {
                emit(window_kind::cplane_ul, ota - cfg_.cp_ul_point(),
                     encode_cplane(c, eaxc, next_seq(window_kind::cplane_ul, port), codec_));
                counters_.cplane_ul_sent++;
            }
        }
        counters_.ul_slots_scheduled++;
    }

    if (pl.prach) {
        const prach_config& pc = cfg_.prach;
        const unsigned      need =
            (pc.length_ra + NOF_SUBCARRIERS_PER_PRB - 1) / NOF_SUBCARRIERS_PER_PRB;
        for (unsigned port = 0; port != cfg_.nof_ports; ++port) {
            const eaxc_id eaxc{0, 0, 0, static_cast<std::uint8_t>(port)};
            cplane_message c;
            c.app                 = header_for(sp, data_direction::uplink);
            c.app.filter_index    = filter_index::prach;
            c.app.start_symbol_id = static_cast<std::uint8_t>(pc.start_symbol);
            c.section_type        = 3;
            c.comp                = cfg_.comp;
            cplane_section s;
            s.section_id = PRACH_SECTION_ID;
            s.start_prb  = 0;
            s.num_prb    = static_cast<std::uint16_t>(need);
            s.num_symbol = static_cast<std::uint8_t>(pc.nof_symbols);
            s.prach      = prach_section_fields{0, static_cast<std::uint8_t>(cfg_.numerology.mu), 0,
                                                pc.freq_offset_halfscs};
            c.sections.push_back(s);
            emit(window_kind::cplane_ul, ota - cfg_.cp_ul_point(),
                 encode_cplane(c, eaxc, next_seq(window_kind::cplane_ul, port), codec_));
            counters_.cplane_ul_sent++;
        }
        counters_.prach_occasions_scheduled++;
    }
    return out;
}

void du_engine::on_uplink_frame(std::span<const std::uint8_t> bytes, usec arrival)
{
    decoded_uplane f;
    try {
        f = decode_uplane(bytes, codec_);
    } catch (const decode_error&) {
        counters_.ul_decode_errors++;
        return;
    }
    const uplane_message& m = f.msg;
    if (m.app.direction != data_direction::uplink || f.header.eaxc.ru_port >= cfg_.nof_ports) {
        counters_.ul_decode_errors++;
        return;
    }

    const std::int64_t abs =
        cfg_.timebase.resolve(m.app.frame_id, m.app.subframe_id, m.app.slot_id, cfg_.timebase.slot_at(arrival));
    const usec ota    = cfg_.timebase.ota_time(abs);
    const auto lambda = (arrival - ota).count();
    if (counters_.lambda_count == 0) {
        counters_.lambda_min_us = counters_.lambda_max_us = lambda;
    } else {
        counters_.lambda_min_us = std::min(counters_.lambda_min_us, static_cast<std::int64_t>(lambda));
        counters_.lambda_max_us = std::max(counters_.lambda_max_us, static_cast<std::int64_t>(lambda));
    }
    counters_.lambda_count++;
    counters_.lambda_sum_us += lambda;

    const window_verdict v = check_window(window_kind::uplane_ul_rx, arrival, ota, cfg_.profile);
    switch (v) {
        case window_verdict::early:
            counters_.ul_early++;
            break;
        case window_verdict::late:
            counters_.ul_late++;
            break;
        case window_verdict::on_time:
            counters_.ul_on_time++;
            break;
    }

    const seq_result sr =
        tracker_.track(f.header.eaxc.pack(cfg_.layout), data_direction::uplink, ofh_plane::user, f.header.seq_id);
    if (sr.status == seq_status::gap) {
        counters_.ul_seq_gaps += sr.missing;
    } else if (sr.status == seq_status::duplicate) {
        counters_.ul_duplicates++;
        return;
    }
    if (v != window_verdict::on_time) {
        return;
    }

    const bool prach = m.app.filter_index == filter_index::prach;
    if (prach) {
        counters_.ul_prach_frames++;
    }
    if (!sink_) {
        return;
    }
    for (const auto& s : m.sections) {
        uplink_delivery d;
        d.absolute_slot = abs;
        d.port          = f.header.eaxc.ru_port;
        d.symbol        = m.app.start_symbol_id;
        d.prach         = prach;
        d.section_id    = s.section_id;
        d.start_prb     = s.start_prb;
        d.arrival       = arrival;
        d.values.reserve(s.prbs.size() * NOF_SUBCARRIERS_PER_PRB);
        for (const auto& prb : s.prbs) {
            const iq_block iq = decompress(prb);
            for (std::size_t i = 0; i != IQ_VALUES_PER_PRB; i += 2) {
                d.values.emplace_back(from_fixed(iq[i]), from_fixed(iq[i + 1]));
            }
        }
        if (prach && d.values.size() > cfg_.prach.length_ra) {
            d.values.resize(cfg_.prach.length_ra);
        }
        sink_(d);
    }
}

std::vector<du_emission> du_engine::run_pattern(unsigned n_frames, std::int64_t first_slot)
{
    const std::int64_t n =
        static_cast<std::int64_t>(n_frames) * NOF_SUBFRAMES_PER_FRAME * cfg_.numerology.slots_per_subframe();
    std::vector<du_emission> out;
    for (std::int64_t abs = first_slot; abs != first_slot + n; ++abs) {
        const slot_plan pl = plan(abs);
        slot_payload    payload;
        resource_grid   grid;
        if (pl.downlink) {
            grid       = dl_source_grid(abs);
            payload.dl = &grid;
        }
        payload.ul    = pl.grant;
        payload.prach = pl.prach;
        auto e        = schedule_slot(abs, schedule_time(abs), payload);
        std::move(e.begin(), e.end(), std::back_inserter(out));
    }
    return out;
}

} // namespace ofhsim
