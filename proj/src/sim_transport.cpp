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

#include "ofhsim/sim_transport.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>

namespace ofhsim {

fronthaul_link::fronthaul_link(link_model model) : model_(std::move(model)), rng_(model_.seed)
{
    model_.validate();
}

std::optional<usec> fronthaul_link::sample()
{
    if (model_.drop_rate > 0.0) {
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        if (u < model_.drop_rate) {
            return std::nullopt;
        }
    }
    switch (model_.jitter) {
        case jitter_kind::uniform: {
            const auto span = static_cast<std::uint64_t>((model_.jitter_hi - model_.jitter_lo).count());
            return model_.base_delay + model_.jitter_lo + usec{static_cast<std::int64_t>(rng_() % (span + 1))};
        }
        case jitter_kind::sequence:
            return model_.base_delay + model_.sequence[next_++ % model_.sequence.size()];
        case jitter_kind::none:
            break;
    }
    return model_.base_delay;
}

void event_queue::schedule(usec at, event_phase phase, action fn)
{
    if (at < now_) {
        throw std::logic_error("event scheduled at " + std::to_string(at.count()) + " us, before the current time " +
                               std::to_string(now_.count()) + " us");
    }
    heap_.push(event{at, phase, next_seq_++, std::move(fn)});
}

void event_queue::run(const std::function<void(usec)>& after_each)
{
    while (!heap_.empty()) {
        event e = heap_.top();
        heap_.pop();
        now_ = e.at;
        e.fn();
        ++executed_;
        if (after_each) {
            after_each(now_);
        }
    }
}

namespace {

constexpr std::uint64_t TAG_UL      = 0x554c;
constexpr std::size_t   LOG_LIMIT   = 20;
constexpr double        FIXED_SCALE = 32768.0;
constexpr int           UL_STREAM   = -1;

/// Worst-case per-component error of the float -> int16 -> BFP -> float chain for one PRB of source values.
double prb_error_bound(std::span<const cf_t> prb, const comp_params& comp)
{
    iq_block iq{};
    for (std::size_t k = 0; k != prb.size(); ++k) {
        iq[2 * k]     = to_fixed(prb[k].real());
        iq[2 * k + 1] = to_fixed(prb[k].imag());
    }
    const unsigned e    = compress(iq, comp).exponent;
    const double   quant = e == 0 ? 0.0 : std::ldexp(1.0, static_cast<int>(e) - 1);
    return (quant + 0.5) / FIXED_SCALE + 1e-9;
}

/// Largest per-component excess of |got - want| over the PRB-wise bound; <= 0 means within bounds.
double worst_excess(std::span<const cf_t> got, std::span<const cf_t> want, const comp_params& comp, double& max_err)
{
    double worst = -1.0;
    for (std::size_t p = 0; p * NOF_SUBCARRIERS_PER_PRB < want.size(); ++p) {
        const auto w     = want.subspan(p * NOF_SUBCARRIERS_PER_PRB,
                                        std::min<std::size_t>(NOF_SUBCARRIERS_PER_PRB, want.size() - p * NOF_SUBCARRIERS_PER_PRB));
        const double bound = prb_error_bound(w, comp);
        for (std::size_t k = 0; k != w.size(); ++k) {
            const cf_t   g   = got[p * NOF_SUBCARRIERS_PER_PRB + k];
            const double err = std::max(std::abs(g.real() - w[k].real()), std::abs(g.imag() - w[k].imag()));
            max_err          = std::max(max_err, err);
            worst            = std::max(worst, err - bound);
        }
    }
    return worst;
}

class harness
{
public:
    explicit harness(const scenario& sc) :
        sc_(sc),
        tb_(sc.timebase()),
        du_(sc.make_du_config()),
        ru_(sc.make_ru_config()),
        dl_link_(sc.dl_link()),
        ul_link_(sc.ul_link()),
        ue_(sc.numerology),
        offset_(sc.ru_clock_offset),
        n_(sc.nof_slots())
    {
        const usec slot = sc.numerology.slot_duration();
        keep_slots_     = (sc.du_profile.ta4_max + sc.fh.t34_max + ul_link_.model().max_delay()).count() / slot.count() + 8;
        du_.set_uplink_sink([this](const uplink_delivery& d) { on_delivery(d); });
    }

    run_result execute()
    {
        for (std::int64_t s = 0; s != n_; ++s) {
            res_.du_plans.push_back(du_.plan(s));
        }
        for (std::int64_t s = 0; s != n_; ++s) {
            q_.schedule(du_.schedule_time(s), event_phase::du_boundary, [this, s] { du_slot(s); });
        }
        for (std::int64_t s = -static_cast<std::int64_t>(sc_.lowphy_lead_slots); s <= n_; ++s) {
            q_.schedule(tb_.ota_time(s) - offset_, event_phase::ru_boundary, [this, s] { ru_slot(s); });
        }
        for (std::int64_t s = 0; s != n_; ++s) {
            q_.schedule(tb_.ota_time(s) - offset_, event_phase::air, [this, s] { ue_uplink(s); });
        }
        q_.run([this](usec now) { poll_pool(now); });

        res_.ru              = ru_.snapshot_counters();
        res_.du              = du_.snapshot_counters();
        res_.ru_activity     = ru_.activity();
        res_.events_executed = q_.executed();
        for (std::int64_t s = 0; s != n_; ++s) {
            const slot_plan& p = res_.du_plans[static_cast<std::size_t>(s)];
            const auto       it = res_.ru_activity.find(s);
            const ru_slot_activity a = it == res_.ru_activity.end() ? ru_slot_activity{} : it->second;
            if (a.dl_modulated != p.downlink || a.ul_emitted != p.uplink || a.prach_emitted != p.prach) {
                if (res_.direction_mismatches++ < LOG_LIMIT) {
                    note("slot " + std::to_string(s) + ": RU activity differs from the DU schedule");
                }
            }
        }
        summarize();
        return std::move(res_);
    }

private:
    void note(std::string line) { res_.log.push_back(std::move(line)); }

    static void track(std::optional<usec>& lo, std::optional<usec>& hi, usec d)
    {
        lo = lo ? std::min(*lo, d) : d;
        hi = hi ? std::max(*hi, d) : d;
    }

    void du_slot(std::int64_t s)
    {
        const slot_plan& pl = res_.du_plans[static_cast<std::size_t>(s)];
        slot_payload     payload;
        resource_grid    grid;
        if (pl.downlink) {
            grid       = du_.dl_source_grid(s);
            payload.dl = &grid;
        }
        payload.ul    = pl.grant;
        payload.prach = pl.prach;
        for (auto& e : du_.schedule_slot(s, q_.now(), payload)) {
            auto em = std::make_shared<du_emission>(std::move(e));
            q_.schedule(em->emit_at, event_phase::frame, [this, em] { send_downlink(*em); });
        }
    }

    /// Samples the link at transmit time. Frames of one stream never overtake each other.
    void send_downlink(du_emission& e)
    {
        std::optional<usec> d = dl_link_.sample();
        if (!d) {
            switch (e.kind) {
                case window_kind::cplane_dl:
                    res_.link.cplane_dl_dropped++;
                    break;
                case window_kind::cplane_ul:
                    res_.link.cplane_ul_dropped++;
                    break;
                default:
                    res_.link.uplane_dl_dropped++;
                    break;
            }
            return;
        }
        usec arrival = q_.now() + *d;
        if (e.kind == window_kind::uplane_dl) {
            arrival += sc_.uplane_dl_extra_delay;
        }
        usec& last = last_arrival_[static_cast<int>(e.kind)];
        arrival    = std::max(arrival, last);
        last       = arrival;
        track(res_.link.dl_min_delay, res_.link.dl_max_delay,
              arrival - q_.now() - (e.kind == window_kind::uplane_dl ? sc_.uplane_dl_extra_delay : usec{0}));
        auto bytes = std::make_shared<std::vector<std::uint8_t>>(std::move(e.bytes));
        q_.schedule(arrival, event_phase::frame, [this, bytes] {
            const usec local = q_.now() + offset_;
            res_.capture.records.push_back({capture_direction::du_to_ru, local, *bytes});
            ru_.on_frame(*bytes, local);
        });
    }

    void ru_slot(std::int64_t s)
    {
        std::vector<sample_block> ul;
        if (auto it = ul_buffer_.find(s - 1); it != ul_buffer_.end()) {
            ul = std::move(it->second);
            ul_buffer_.erase(it);
        }
        ru_slot_output out = ru_.on_slot_boundary(tb_.point(s), q_.now() + offset_, ul);
        const std::int64_t dl = out.dl_absolute_slot;
        if (dl >= 0 && dl < n_ && sc_.check_integrity) {
            auto blocks = std::make_shared<std::vector<sample_block>>(std::move(out.dl));
            q_.schedule(tb_.ota_time(dl) - offset_, event_phase::air, [this, dl, blocks] { ue_downlink(dl, *blocks); });
        }
    }

    void ue_uplink(std::int64_t s)
    {
        const slot_plan& pl = res_.du_plans[static_cast<std::size_t>(s)];
        if (!pl.uplink) {
            return;
        }
        resource_grid grid(tb_.point(s), sc_.nof_ports, sc_.numerology.nof_prb);
        fill_qpsk(grid, sc_.seed, s, TAG_UL, pl.grant->ranges);
        if (pl.prach) {
            const int k = prach_start_subcarrier(sc_.prach.freq_offset_halfscs) +
                          static_cast<int>(sc_.numerology.nof_subcarriers() / 2) + static_cast<int>(sc_.prach_tone_bin);
            for (unsigned port = 0; port != sc_.nof_ports; ++port) {
                for (unsigned sym = sc_.prach.start_symbol; sym != sc_.prach.start_symbol + sc_.prach.nof_symbols; ++sym) {
                    grid.at(sym, static_cast<unsigned>(k), port) = cf_t{0.5, 0.0};
                }
            }
        }
        ul_buffer_[s] = ue_.modulate(grid, tb_.ota_ticks(s));
        if (sc_.check_integrity) {
            res_.integrity.ul_sections_expected +=
                pl.grant->ranges.size() * sc_.nof_ports * pl.grant->nof_symbols;
            if (pl.prach) {
                res_.integrity.prach_symbols_expected += static_cast<std::uint64_t>(sc_.prach.nof_symbols) * sc_.nof_ports;
            }
            ul_expected_.emplace(s, std::move(grid));
            ul_expected_.erase(ul_expected_.begin(), ul_expected_.lower_bound(s - keep_slots_));
        }
    }

    void ue_downlink(std::int64_t s, const std::vector<sample_block>& blocks)
    {
        const slot_plan& pl = res_.du_plans[static_cast<std::size_t>(s)];
        integrity_report& ir = res_.integrity;
        if (!pl.downlink) {
            ir.silent_slots_checked++;
            const bool silent = std::all_of(blocks.begin(), blocks.end(), [](const sample_block& b) {
                return std::all_of(b.samples.begin(), b.samples.end(), [](cf_t v) { return v == cf_t{}; });
            });
            if (!silent && ir.silent_failures++ < LOG_LIMIT) {
                note("slot " + std::to_string(s) + ": energy on the air in a slot without DL schedule");
            }
            return;
        }
        ir.dl_slots_checked++;
        const resource_grid src = du_.dl_source_grid(s);
        double              worst = -1.0;
        for (const sample_block& b : blocks) {
            const resource_grid got = ue_.demodulate(b);
            for (unsigned sym = 0; sym != NOF_SYMBOLS_PER_SLOT; ++sym) {
                worst = std::max(worst, worst_excess(got.symbol(sym, 0), src.symbol(sym, b.port), sc_.comp, ir.dl_max_error));
            }
        }
        if (worst > 0.0 && ir.dl_failures++ < LOG_LIMIT) {
            std::ostringstream os;
            os << "slot " << s << ": DL grid exceeds the compression error bound by " << worst;
            note(os.str());
        }
    }

    void on_delivery(const uplink_delivery& d)
    {
        if (!sc_.check_integrity) {
            return;
        }
        integrity_report& ir = res_.integrity;
        const auto        it = ul_expected_.find(d.absolute_slot);
        if (it == ul_expected_.end()) {
            if (ir.ul_failures++ < LOG_LIMIT) {
                note("slot " + std::to_string(d.absolute_slot) + ": UL data delivered for a slot the UE did not transmit");
            }
            return;
        }
        const auto re = it->second.symbol(d.symbol, d.port);
        if (d.prach) {
            ir.prach_symbols_received++;
            const auto first = static_cast<std::size_t>(prach_start_subcarrier(sc_.prach.freq_offset_halfscs) +
                                                        static_cast<int>(sc_.numerology.nof_subcarriers() / 2));
            const auto want  = re.subspan(first, d.values.size());
            if (worst_excess(d.values, want, sc_.comp, ir.ul_max_error) > 0.0 && ir.prach_failures++ < LOG_LIMIT) {
                note("slot " + std::to_string(d.absolute_slot) + ": PRACH bins exceed the compression error bound");
            }
            const auto peak = std::max_element(d.values.begin(), d.values.end(),
                                               [](cf_t a, cf_t b) { return std::abs(a) < std::abs(b); });
            if (peak != d.values.end() && static_cast<unsigned>(peak - d.values.begin()) == sc_.prach_tone_bin) {
                ir.prach_tone_hits++;
            }
            return;
        }
        ir.ul_sections_received++;
        const std::size_t start = static_cast<std::size_t>(d.start_prb) * NOF_SUBCARRIERS_PER_PRB;
        if (start + d.values.size() > re.size()) {
            ir.ul_failures++;
            return;
        }
        if (worst_excess(d.values, re.subspan(start, d.values.size()), sc_.comp, ir.ul_max_error) > 0.0 &&
            ir.ul_failures++ < LOG_LIMIT) {
            note("slot " + std::to_string(d.absolute_slot) + " port " + std::to_string(d.port) + " symbol " +
                 std::to_string(d.symbol) + ": UL data exceeds the compression error bound");
        }
    }

    void poll_pool(usec now)
    {
        for (pool_frame& f : ru_.drain_frame_pool(now + offset_)) {
            send_uplink(f, now);
        }
        if (const auto due = ru_.next_pool_due()) {
            const usec at = std::max(*due - offset_, now);
            if (wakes_.insert(at).second) {
                q_.schedule(at, event_phase::pool_wake, [] {});
            }
        }
    }

    void send_uplink(pool_frame& f, usec now)
    {
        res_.ta3.frames++;
        const usec rel = now + offset_ - f.ota;
        if (rel < sc_.ru_profile.ta3_min || rel > sc_.ru_profile.ta3_max) {
            if (res_.ta3.violations++ < LOG_LIMIT) {
                note("UL frame of slot " + std::to_string(f.absolute_slot) + " left " + std::to_string(rel.count()) +
                     " us after OTA, outside the Ta3 window");
            }
        }
        const std::optional<usec> d = ul_link_.sample();
        if (!d) {
            res_.link.uplane_ul_dropped++;
            return;
        }
        usec& last    = last_arrival_[UL_STREAM];
        const usec at = std::max(now + *d, last);
        last          = at;
        track(res_.link.ul_min_delay, res_.link.ul_max_delay, at - now);
        auto bytes = std::make_shared<std::vector<std::uint8_t>>(std::move(f.bytes));
        q_.schedule(at, event_phase::frame, [this, bytes] {
            res_.capture.records.push_back({capture_direction::ru_to_du, q_.now(), *bytes});
            du_.on_uplink_frame(*bytes, q_.now());
        });
    }

    void summarize()
    {
        const integrity_report& ir = res_.integrity;
        std::ostringstream      os;
        os << "integrity: dl " << ir.dl_slots_checked - ir.dl_failures << "/" << ir.dl_slots_checked << " slots, ul "
           << ir.ul_sections_received << "/" << ir.ul_sections_expected << " sections (" << ir.ul_failures
           << " bad), prach " << ir.prach_symbols_received << "/" << ir.prach_symbols_expected << " symbols ("
           << ir.prach_failures << " bad, " << ir.prach_tone_hits << " tone hits)";
        note(os.str());
        note("ta3 audit: " + std::to_string(res_.ta3.frames) + " frames, " + std::to_string(res_.ta3.violations) +
             " outside the window");
    }

    const scenario& sc_;
    slot_timebase   tb_;
    du_engine       du_;
    ru_engine       ru_;
    fronthaul_link  dl_link_;
    fronthaul_link  ul_link_;
    ofdm_processor  ue_;
    usec            offset_;
    std::int64_t    n_;
    std::int64_t    keep_slots_ = 16;
    event_queue     q_;
    run_result      res_;
    std::set<usec>  wakes_;
    std::map<int, usec> last_arrival_;
    std::map<std::int64_t, std::vector<sample_block>> ul_buffer_;
    std::map<std::int64_t, resource_grid>             ul_expected_;
};

} // namespace

run_result run(const scenario& sc)
{
    sc.validate();
    harness h(sc);
    return h.execute();
}

ru_counters replay(const capture_file& capture, const ru_config& cfg)
{
    ru_engine          ru(cfg);
    const auto&        tb = cfg.timebase;
    std::int64_t       s  = cfg.first_slot;
    for (const capture_record& r : capture.records) {
        if (r.direction != capture_direction::du_to_ru) {
            continue;
        }
        while (tb.ota_time(s) < r.time) {
            ru.on_slot_boundary(tb.point(s), tb.ota_time(s), {});
            ++s;
        }
        ru.on_frame(r.bytes, r.time);
    }
    return ru.snapshot_counters();
}

} // namespace ofhsim
