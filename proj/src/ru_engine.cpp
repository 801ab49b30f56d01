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

#include "ofhsim/ru_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ofhsim {

namespace {

constexpr double FIXED_SCALE = 32768.0;

std::int64_t positive_mod(std::int64_t a, std::int64_t m)
{
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace

std::int16_t to_fixed(double v)
{
    const double r = std::round(v * FIXED_SCALE);
    return static_cast<std::int16_t>(std::clamp(r, -32768.0, 32767.0));
}

double from_fixed(std::int16_t v)
{
    return v / FIXED_SCALE;
}

usec ru_config::effective_ta3_tx_point() const
{
    return ta3_tx_point ? *ta3_tx_point : profile.ta3_min + (profile.ta3_max - profile.ta3_min) / 2;
}

unsigned ru_config::effective_capacity() const
{
    if (repository_capacity != 0) {
        return repository_capacity;
    }
    const usec deepest = std::max({profile.t2a_max_cp_dl, profile.t2a_max_cp_ul, profile.t2a_max_up});
    const auto slot    = numerology.slot_duration().count();
    return static_cast<unsigned>((deepest.count() + slot - 1) / slot) + 4;
}

void ru_config::validate() const
{
    numerology.validate();
    profile.validate();
    layout.validate();
    const usec slot = numerology.slot_duration();
    if (nof_ports == 0 || nof_ports > (1U << layout.ru_port_bits)) {
        throw std::invalid_argument("nof_ports " + std::to_string(nof_ports) + " does not fit the eAxC ru_port field");
    }
    if (lowphy_lead_slots == 0) {
        throw std::invalid_argument("lowphy_lead_slots must be at least 1");
    }
    const usec lead = slot * lowphy_lead_slots;
    if (profile.t2a_min_up < lead || profile.t2a_min_cp_dl < lead) {
        throw std::invalid_argument("T2a minimum below the low-PHY lead of " + std::to_string(lead.count()) +
                                    " us: on-time DL data could miss modulation");
    }
    const usec tx = effective_ta3_tx_point();
    if (tx < profile.ta3_min || tx > profile.ta3_max) {
        throw std::invalid_argument("ta3_tx_point " + std::to_string(tx.count()) + " us outside the Ta3 window");
    }
    if (tx < slot) {
        throw std::invalid_argument("ta3_tx_point " + std::to_string(tx.count()) +
                                    " us precedes the end of the UL slot");
    }
    const usec     deepest = std::max({profile.t2a_max_cp_dl, profile.t2a_max_cp_ul, profile.t2a_max_up});
    const unsigned needed  = static_cast<unsigned>((deepest.count() + slot.count() - 1) / slot.count()) + 2;
    if (effective_capacity() < needed) {
        throw std::invalid_argument("repository capacity " + std::to_string(effective_capacity()) +
                                    " below the " + std::to_string(needed) + " slots the T2a windows span");
    }
    if (timebase.mu != numerology.mu || timebase.slot_duration != slot ||
        timebase.samples_per_slot != numerology.samples_per_slot()) {
        throw std::invalid_argument("timebase does not match the numerology");
    }
}

void frame_pool::push(pool_frame f)
{
    f.order = next_order_++;
    heap_.push(std::move(f));
}

std::vector<pool_frame> frame_pool::drain(usec now)
{
    std::vector<pool_frame> out;
    while (!heap_.empty() && heap_.top().transmit_at <= now) {
        out.push_back(heap_.top());
        heap_.pop();
    }
    return out;
}

std::optional<usec> frame_pool::next_due() const
{
    if (heap_.empty()) {
        return std::nullopt;
    }
    return heap_.top().transmit_at;
}

template <typename T>
T* ru_engine::repository<T>::find(std::int64_t slot)
{
    auto& b = bucket(slot);
    return b && b->slot == slot ? &*b : nullptr;
}

template <typename T>
std::optional<T>& ru_engine::repository<T>::bucket(std::int64_t slot)
{
    return entries_[static_cast<std::size_t>(positive_mod(slot, static_cast<std::int64_t>(entries_.size())))];
}

namespace {

ru_config validated(ru_config cfg)
{
    cfg.validate();
    return cfg;
}

} // namespace

ru_engine::ru_engine(ru_config cfg) :
    cfg_(validated(std::move(cfg))),
    codec_{cfg_.numerology.mu, cfg_.numerology.nof_prb, cfg_.layout},
    ta3_tx_point_(cfg_.effective_ta3_tx_point()),
    ofdm_(cfg_.numerology),
    dl_repo_(cfg_.effective_capacity()),
    ul_repo_(cfg_.effective_capacity()),
    prach_repo_(cfg_.effective_capacity()),
    ul_seq_(cfg_.nof_ports, 0),
    current_(cfg_.first_slot - 1)
{
    const unsigned cap = cfg_.effective_capacity();
    rg_pool_.reserve(cap);
    for (unsigned i = 0; i != cap; ++i) {
        rg_pool_.emplace_back(slot_point(cfg_.numerology.mu, 0U), cfg_.nof_ports, cfg_.numerology.nof_prb);
        rg_free_.push_back(cap - 1 - i);
    }
}

std::size_t ru_engine::rg_in_use() const
{
    return rg_pool_.size() - rg_free_.size();
}

reception_counters& ru_engine::stream(data_direction dir, ofh_plane plane)
{
    if (plane == ofh_plane::control) {
        return dir == data_direction::downlink ? counters_.cplane_dl : counters_.cplane_ul;
    }
    return dir == data_direction::downlink ? counters_.uplane_dl : counters_.unclassified;
}

void ru_engine::on_frame(std::span<const std::uint8_t> bytes, usec arrival)
{
    decoded_frame frame;
    try {
        frame = decode_frame(bytes, codec_);
    } catch (const decode_error&) {
        // Attribute the error to a stream when the fixed headers are readable.
        // Only the eCPRI version and message type are trusted here; the length fields may be the damage.
        const bool known = bytes.size() >= 2 && (bytes[0] >> 4) == 1 &&
                           (bytes[1] == static_cast<std::uint8_t>(ecpri_msg_type::rt_control) ||
                            bytes[1] == static_cast<std::uint8_t>(ecpri_msg_type::iq_data));
        try {
            if (!known) {
                throw decode_error(decode_errc::bad_message_type, "unknown eCPRI header");
            }
            const app_header app = peek_app_header(bytes);
            const bool       cp  = bytes[1] == static_cast<std::uint8_t>(ecpri_msg_type::rt_control);
            stream(app.direction, cp ? ofh_plane::control : ofh_plane::user).decode_error++;
        } catch (const decode_error&) {
            counters_.unclassified.decode_error++;
        }
        return;
    }
    if (const auto* c = std::get_if<decoded_cplane>(&frame)) {
        handle_cplane(*c, arrival);
    } else {
        handle_uplane(std::get<decoded_uplane>(frame), arrival);
    }
}

void ru_engine::release_rg(std::size_t rg)
{
    rg_pool_[rg].clear();
    rg_free_.push_back(rg);
    counters_.rg_released++;
}

void ru_engine::handle_cplane(const decoded_cplane& f, usec arrival)
{
    const cplane_message& m   = f.msg;
    reception_counters&   cnt = stream(m.app.direction, ofh_plane::control);
    const unsigned        port = f.header.eaxc.ru_port;
    if (port >= cfg_.nof_ports || (m.section_type == 3 && m.app.direction != data_direction::uplink)) {
        cnt.decode_error++;
        return;
    }

    const std::int64_t abs =
        cfg_.timebase.resolve(m.app.frame_id, m.app.subframe_id, m.app.slot_id, cfg_.timebase.slot_at(arrival));
    const window_kind kind =
        m.app.direction == data_direction::downlink ? window_kind::cplane_dl : window_kind::cplane_ul;
    switch (check_window(kind, arrival, cfg_.timebase.ota_time(abs), cfg_.profile)) {
        case window_verdict::early:
            cnt.early_dropped++;
            return;
        case window_verdict::late:
            cnt.late_dropped++;
            return;
        case window_verdict::on_time:
            break;
    }

    auto alloc_of = [&](const cplane_section& s) {
        section_alloc a;
        a.section_id   = s.section_id;
        a.start_prb    = s.start_prb;
        a.num_prb_wire = s.num_prb;
        a.num_prb      = effective_num_prb(s.start_prb, s.num_prb, cfg_.numerology.nof_prb);
        a.start_symbol = m.app.start_symbol_id;
        a.num_symbol   = s.num_symbol;
        return a;
    };

    if (m.section_type == 3) {
        auto& b = prach_repo_.bucket(abs);
        if (!b || b->slot != abs) {
            b.emplace();
            b->slot = abs;
            b->per_port.assign(cfg_.nof_ports, std::nullopt);
        }
        b->comp = m.comp;
        for (const auto& s : m.sections) {
            b->per_port[port] = prach_alloc{alloc_of(s), s.prach ? s.prach->freq_offset : 0};
        }
    } else if (m.app.direction == data_direction::downlink) {
        auto& b = dl_repo_.bucket(abs);
        if (!b || b->slot != abs) {
            if (b) {
                release_rg(b->rg);
                b.reset();
            }
            if (rg_free_.empty()) {
                throw ru_engine_fault("resource grid pool exhausted");
            }
            b.emplace();
            b->slot = abs;
            b->per_port.assign(cfg_.nof_ports, {});
            b->rg = rg_free_.back();
            rg_free_.pop_back();
            rg_pool_[b->rg].set_slot(cfg_.timebase.point(abs));
            counters_.rg_acquired++;
        }
        for (const auto& s : m.sections) {
            b->per_port[port].push_back(alloc_of(s));
        }
    } else {
        auto& b = ul_repo_.bucket(abs);
        if (!b || b->slot != abs) {
            b.emplace();
            b->slot = abs;
            b->per_port.assign(cfg_.nof_ports, {});
        }
        b->comp = m.comp;
        for (const auto& s : m.sections) {
            b->per_port[port].push_back(alloc_of(s));
        }
    }
    cnt.on_time++;
}

void ru_engine::handle_uplane(const decoded_uplane& f, usec arrival)
{
    const uplane_message& m = f.msg;
    if (m.app.direction != data_direction::downlink) {
        counters_.unclassified.decode_error++;
        return;
    }
    reception_counters& cnt  = counters_.uplane_dl;
    const unsigned      port = f.header.eaxc.ru_port;
    if (port >= cfg_.nof_ports) {
        cnt.decode_error++;
        return;
    }

    const std::int64_t abs =
        cfg_.timebase.resolve(m.app.frame_id, m.app.subframe_id, m.app.slot_id, cfg_.timebase.slot_at(arrival));
    switch (check_window(window_kind::uplane_dl, arrival, cfg_.timebase.ota_time(abs), cfg_.profile)) {
        case window_verdict::early:
            cnt.early_dropped++;
            return;
        case window_verdict::late:
            cnt.late_dropped++;
            return;
        case window_verdict::on_time:
            break;
    }

    dl_context* ctx = dl_repo_.find(abs);
    if (ctx == nullptr) {
        cnt.no_context_dropped++;
        return;
    }
    const unsigned sym     = m.app.start_symbol_id;
    const auto&    allocs  = ctx->per_port[port];
    auto           covered = [&](const uplane_section& s) {
        const unsigned n = effective_num_prb(s.start_prb, s.num_prb, cfg_.numerology.nof_prb);
        return std::any_of(allocs.begin(), allocs.end(), [&](const section_alloc& a) {
            return a.section_id == s.section_id && sym >= a.start_symbol && sym < a.start_symbol + a.num_symbol &&
                   s.start_prb >= a.start_prb && s.start_prb + n <= a.start_prb + a.num_prb;
        });
    };
    if (!std::all_of(m.sections.begin(), m.sections.end(), covered)) {
        cnt.no_context_dropped++;
        return;
    }

    resource_grid&    rg = rg_pool_[ctx->rg];
    std::vector<cf_t> values;
    for (const auto& s : m.sections) {
        values.clear();
        for (const auto& prb : s.prbs) {
            const iq_block iq = decompress(prb);
            for (std::size_t i = 0; i != IQ_VALUES_PER_PRB; i += 2) {
                values.emplace_back(from_fixed(iq[i]), from_fixed(iq[i + 1]));
            }
        }
        rg.write_prbs(sym, port, s.start_prb, values);
    }
    cnt.on_time++;
}

void ru_engine::reclaim_stale()
{
    for (auto& b : dl_repo_.entries()) {
        if (b && b->slot <= current_ + static_cast<std::int64_t>(cfg_.lowphy_lead_slots)) {
            release_rg(b->rg);
            b.reset();
        }
    }
    for (auto& b : ul_repo_.entries()) {
        if (b && b->slot < current_ - 1) {
            b.reset();
        }
    }
    for (auto& b : prach_repo_.entries()) {
        if (b && b->slot < current_ - 1) {
            b.reset();
        }
    }
}

std::uint8_t ru_engine::next_seq(unsigned port)
{
    return ul_seq_[port]++;
}

void ru_engine::emit_uplink(const sample_block& block)
{
    const std::uint64_t sps = cfg_.numerology.samples_per_slot();
    if (block.start.ticks % sps != 0) {
        throw ru_engine_fault("UL sample block is not slot aligned");
    }
    if (block.port >= cfg_.nof_ports) {
        throw ru_engine_fault("UL sample block for unknown port " + std::to_string(block.port));
    }
    const auto         abs   = static_cast<std::int64_t>(block.start.ticks / sps);
    const usec         ota   = cfg_.timebase.ota_time(abs);
    const slot_point   sp    = cfg_.timebase.point(abs);
    const unsigned     port  = block.port;
    const eaxc_id      eaxc{0, 0, 0, static_cast<std::uint8_t>(port)};
    ru_slot_activity&  act   = activity_[abs];

    app_header app;
    app.direction   = data_direction::uplink;
    app.frame_id    = static_cast<std::uint8_t>(sp.sfn() % 256);
    app.subframe_id = static_cast<std::uint8_t>(sp.subframe_index());
    app.slot_id     = static_cast<std::uint8_t>(sp.slot_index());

    auto enqueue = [&](const uplane_message& msg, bool prach) {
        pool_frame f;
        f.transmit_at   = ota + ta3_tx_point_;
        f.absolute_slot = abs;
        f.ota           = ota;
        f.prach         = prach;
        f.bytes         = encode_uplane(msg, eaxc, next_seq(port), codec_);
        pool_.push(std::move(f));
        counters_.ul_frames_enqueued++;
    };

    ul_context* ul = ul_repo_.find(abs);
    if (ul != nullptr && !ul->per_port[port].empty()) {
        const resource_grid grid = ofdm_.demodulate(block);
        for (unsigned sym = 0; sym != NOF_SYMBOLS_PER_SLOT; ++sym) {
            uplane_message msg;
            msg.app                 = app;
            msg.app.start_symbol_id = static_cast<std::uint8_t>(sym);
            const auto re           = grid.symbol(sym, 0);
            for (const auto& a : ul->per_port[port]) {
                if (sym < a.start_symbol || sym >= a.start_symbol + a.num_symbol) {
                    continue;
                }
                uplane_section s;
                s.section_id = a.section_id;
                s.start_prb  = a.start_prb;
                s.num_prb    = a.num_prb_wire;
                s.comp       = ul->comp;
                for (unsigned p = 0; p != a.num_prb; ++p) {
                    iq_block iq;
                    for (unsigned k = 0; k != NOF_SUBCARRIERS_PER_PRB; ++k) {
                        const cf_t v  = re[(a.start_prb + p) * NOF_SUBCARRIERS_PER_PRB + k];
                        iq[2 * k]     = to_fixed(v.real());
                        iq[2 * k + 1] = to_fixed(v.imag());
                    }
                    s.prbs.push_back(compress(iq, ul->comp));
                }
                msg.sections.push_back(std::move(s));
            }
            if (!msg.sections.empty()) {
                enqueue(msg, false);
            }
        }
        if (!act.ul_emitted) {
            act.ul_emitted = true;
            counters_.ul_slots_emitted++;
        }
    }

    prach_context* pr = prach_repo_.find(abs);
    if (pr != nullptr && pr->per_port[port]) {
        const prach_alloc& pa = *pr->per_port[port];
        const unsigned     need_prb =
            (cfg_.prach_length_ra + NOF_SUBCARRIERS_PER_PRB - 1) / NOF_SUBCARRIERS_PER_PRB;
        prach_extract_config px;
        px.freq_offset_halfscs = pa.freq_offset_halfscs;
        px.length_ra           = cfg_.prach_length_ra;
        px.start_symbol        = pa.section.start_symbol;
        px.nof_symbols         = pa.section.num_symbol;
        const auto bins        = ofdm_.extract_prach(block, px);
        for (unsigned s = 0; s != bins.size(); ++s) {
            uplane_message msg;
            msg.app                 = app;
            msg.app.filter_index    = filter_index::prach;
            msg.app.start_symbol_id = static_cast<std::uint8_t>(px.start_symbol + s);
            uplane_section sec;
            sec.section_id = pa.section.section_id;
            sec.start_prb  = pa.section.start_prb;
            sec.num_prb    = static_cast<std::uint16_t>(need_prb);
            sec.comp       = pr->comp;
            for (unsigned p = 0; p != need_prb; ++p) {
                iq_block iq{};
                for (unsigned k = 0; k != NOF_SUBCARRIERS_PER_PRB; ++k) {
                    const unsigned i = p * NOF_SUBCARRIERS_PER_PRB + k;
                    if (i < bins[s].size()) {
                        iq[2 * k]     = to_fixed(bins[s][i].real());
                        iq[2 * k + 1] = to_fixed(bins[s][i].imag());
                    }
                }
                sec.prbs.push_back(compress(iq, pr->comp));
            }
            msg.sections.push_back(std::move(sec));
            enqueue(msg, true);
        }
        if (!act.prach_emitted) {
            act.prach_emitted = true;
            counters_.prach_occasions_emitted++;
        }
    }
}

ru_slot_output ru_engine::on_slot_boundary(const slot_point& slot, usec now, std::span<const sample_block> ul_samples)
{
    const std::int64_t abs = current_ + 1;
    if (slot != cfg_.timebase.point(abs)) {
        throw ru_engine_fault("slot boundary out of order: expected system slot " +
                              std::to_string(cfg_.timebase.point(abs).system_slot()) + ", got " +
                              std::to_string(slot.system_slot()));
    }
    if (started_ && now < cfg_.timebase.ota_time(current_)) {
        throw ru_engine_fault("slot boundary time moved backwards");
    }
    started_ = true;
    current_ = abs;

    ru_slot_output out;
    out.dl_absolute_slot = abs + cfg_.lowphy_lead_slots;
    const sample_timestamp dl_start = cfg_.timebase.ota_ticks(out.dl_absolute_slot);
    auto&                  bucket   = dl_repo_.bucket(out.dl_absolute_slot);
    if (bucket && bucket->slot == out.dl_absolute_slot) {
        out.dl              = ofdm_.modulate(rg_pool_[bucket->rg], dl_start);
        out.dl_from_context = true;
        activity_[out.dl_absolute_slot].dl_modulated = true;
        counters_.dl_slots_modulated++;
        release_rg(bucket->rg);
        bucket.reset();
    } else {
        for (unsigned p = 0; p != cfg_.nof_ports; ++p) {
            out.dl.push_back(sample_block{dl_start, p, std::vector<cf_t>(cfg_.numerology.samples_per_slot())});
        }
        counters_.dl_slots_silent++;
    }

    for (const auto& block : ul_samples) {
        emit_uplink(block);
    }
    reclaim_stale();
    return out;
}

} // namespace ofhsim
