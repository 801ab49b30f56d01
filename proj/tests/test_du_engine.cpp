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

#include <doctest.h>

#include <algorithm>

using namespace ofhsim;

namespace {

du_config tdd_config()
{
    du_config c;
    c.tdd = tdd_pattern::parse("DDDSU");
    return c;
}

std::vector<std::uint8_t> ul_frame(const du_config& c, std::int64_t abs, unsigned port, std::uint8_t seq,
                                   std::uint8_t filter = filter_index::standard, unsigned nprb = 2)
{
    const slot_point p = c.timebase.point(abs);
    uplane_message   m;
    m.app.direction       = data_direction::uplink;
    m.app.filter_index    = filter;
    m.app.frame_id        = static_cast<std::uint8_t>(p.sfn() % 256);
    m.app.subframe_id     = static_cast<std::uint8_t>(p.subframe_index());
    m.app.slot_id         = static_cast<std::uint8_t>(p.slot_index());
    m.app.start_symbol_id = 3;
    uplane_section s;
    s.section_id = 0x100;
    s.start_prb  = 4;
    s.num_prb    = static_cast<std::uint16_t>(nprb);
    for (unsigned i = 0; i != nprb; ++i) {
        iq_block iq{};
        iq[0] = 16384;
        iq[1] = -8192;
        s.prbs.push_back(compress(iq, s.comp));
    }
    m.sections.push_back(s);
    return encode_uplane(m, {0, 0, 0, static_cast<std::uint8_t>(port)}, seq, {c.numerology.mu, c.numerology.nof_prb, {}});
}

} // namespace

TEST_CASE("TDD pattern")
{
    const tdd_pattern p = tdd_pattern::parse("DDDSU");
    CHECK(p.period() == 5);
    CHECK(p.kind_at(3) == slot_kind::special);
    CHECK(p.has_downlink(3));
    CHECK(p.has_uplink(4));
    CHECK(p.has_uplink(-1));
    CHECK_FALSE(p.has_uplink(5));
    CHECK(p.to_string() == "DDDSU");
    const tdd_pattern q = tdd_pattern::parse("DDDDDDDSUU");
    CHECK(q.has_uplink(8));
    CHECK(q.has_uplink(9));
    CHECK(q.kind_at(7) == slot_kind::special);
    CHECK_THROWS_AS(tdd_pattern::parse("DDXU"), du_config_error);
    CHECK_THROWS_AS(tdd_pattern::parse(""), du_config_error);
}

TEST_CASE("PRACH configuration")
{
    const prach_config p = prach_config::from_index(159, 1, default_prach_freq_offset(51));
    CHECK(p.freq_offset_halfscs == -612);
    CHECK(p.length_ra == 139);
    CHECK(p.is_occasion(slot_point(1, 0, 9, 1)));
    CHECK(p.is_occasion(slot_point(1, 77, 9, 1)));
    CHECK_FALSE(p.is_occasion(slot_point(1, 0, 9, 0)));
    CHECK_FALSE(p.is_occasion(slot_point(1, 0, 8, 1)));
    CHECK(p.prbs(51) == prb_range{0, 12});

    const prach_config f = prach_config::from_index(213, 0, default_prach_freq_offset(106));
    CHECK(f.is_occasion(slot_point(0, 3, 9, 0)));
    CHECK(f.prbs(106) == prb_range{0, 12});
    CHECK_THROWS_AS(prach_config::from_index(42, 1, 0), du_config_error);
}

TEST_CASE("DU emission points and validation")
{
    du_config c = tdd_config();
    CHECK(c.cp_dl_point() == usec{2485});
    CHECK(c.cp_ul_point() == usec{2528});
    CHECK(c.up_point() == usec{2320});
    CHECK_NOTHROW(c.validate());

    c.t1a_up_point = usec{2400};
    CHECK_THROWS_AS(c.validate(), du_config_error);
    c              = tdd_config();
    c.t1a_up_point = usec{2179};
    CHECK_THROWS_AS(c.validate(), du_config_error);
    c                         = tdd_config();
    c.scheduling_offset_slots = 5;
    CHECK_THROWS_AS(c.validate(), du_config_error);
    c     = tdd_config();
    c.tdd = tdd_pattern::parse("DDDDD");
    CHECK_THROWS_AS(c.validate(), du_config_error);
}

TEST_CASE("slot plans follow the pattern")
{
    du_engine du(tdd_config());
    for (std::int64_t s = 0; s != 40; ++s) {
        const slot_plan p = du.plan(s);
        CHECK(p.downlink == (s % 5 != 4));
        CHECK(p.uplink == (s % 5 == 4));
        CHECK(p.prach == (s % 20 == 19));
        CHECK(p.grant.has_value() == p.uplink);
    }
    const slot_plan occ = du.plan(19);
    REQUIRE(occ.grant);
    CHECK(occ.grant->ranges == std::vector<prb_range>{{12, 39}});
    CHECK(du.plan(4).grant->ranges == std::vector<prb_range>{{0, 51}});

    du_config fdd;
    fdd.numerology = numerology_config::make(15, 23'040'000, 106);
    fdd.profile    = du_preset(profile_preset::fdd_scs15);
    fdd.timebase   = slot_timebase::for_numerology(fdd.numerology, usec{5000});
    fdd.scheduling_offset_slots = 5;
    fdd.prach = prach_config::from_index(213, 0, default_prach_freq_offset(106));
    du_engine f(fdd);
    CHECK(f.plan(3).downlink);
    CHECK(f.plan(3).uplink);
    CHECK(f.plan(9).prach);
}

TEST_CASE("emissions stay inside T1a with C-plane first")
{
    du_engine du(tdd_config());
    const auto e = du.run_pattern(2);
    const du_counters c = du.snapshot_counters();
    CHECK(c.dl_slots_scheduled == 32);
    CHECK(c.ul_slots_scheduled == 8);
    CHECK(c.prach_occasions_scheduled == 2);
    CHECK(c.cplane_dl_sent == 64);
    CHECK(c.uplane_dl_sent == 64 * 14);
    CHECK(c.cplane_ul_sent == 8 * 2 + 2 * 2);
    CHECK(e.size() == c.cplane_dl_sent + c.uplane_dl_sent + c.cplane_ul_sent);

    const du_delay_profile prof = du_preset(profile_preset::tdd_scs30);
    const slot_timebase    tb   = du.config().timebase;
    for (const auto& x : e) {
        CHECK(check_window(x.kind, x.emit_at, tb.ota_time(x.absolute_slot), prof) == window_verdict::on_time);
    }
    for (std::int64_t s = 0; s != 40; ++s) {
        usec last_c{-1};
        usec first_u{1'000'000'000};
        for (const auto& x : e) {
            if (x.absolute_slot != s) {
                continue;
            }
            if (x.kind == window_kind::cplane_dl) {
                last_c = std::max(last_c, x.emit_at);
            } else if (x.kind == window_kind::uplane_dl) {
                first_u = std::min(first_u, x.emit_at);
            }
        }
        if (du.plan(s).downlink) {
            CHECK(first_u - last_c >= usec{125});
        }
    }
    // the PRACH C-plane is section type 3 with the PRACH filter
    const auto prach = std::find_if(e.begin(), e.end(), [](const du_emission& x) {
        return x.absolute_slot == 19 && x.kind == window_kind::cplane_ul &&
               decode_cplane(x.bytes, {1, 51, {}}).msg.section_type == 3;
    });
    REQUIRE(prach != e.end());
    const auto m = decode_cplane(prach->bytes, {1, 51, {}}).msg;
    CHECK(m.app.filter_index == filter_index::prach);
    CHECK(m.sections[0].prach->freq_offset == -612);
}

TEST_CASE("schedule_slot refuses the wrong instant or payload")
{
    du_engine    du(tdd_config());
    slot_payload empty;
    CHECK_THROWS_AS(du.schedule_slot(4, du.schedule_time(4) + usec{1}, empty), du_config_error);
    CHECK_THROWS_AS(du.schedule_slot(4, du.schedule_time(4), empty), du_config_error);
    slot_payload ul;
    ul.ul = du.plan(4).grant;
    CHECK(du.schedule_slot(4, du.schedule_time(4), ul).size() == 2);
}

TEST_CASE("uplink reception window, sequence handling, delivery")
{
    const du_config c = tdd_config();
    du_engine       du(c);
    std::vector<uplink_delivery> got;
    du.set_uplink_sink([&](const uplink_delivery& d) { got.push_back(d); });
    const usec ota = c.timebase.ota_time(9);

    du.on_uplink_frame(ul_frame(c, 9, 0, 0), ota + usec{925});
    du.on_uplink_frame(ul_frame(c, 9, 0, 1), ota + usec{1325});
    du.on_uplink_frame(ul_frame(c, 9, 0, 2), ota + usec{1326});
    du.on_uplink_frame(ul_frame(c, 9, 1, 0), ota + usec{924});
    du.on_uplink_frame(ul_frame(c, 9, 0, 2), ota + usec{1000});
    du.on_uplink_frame(ul_frame(c, 9, 0, 6), ota + usec{1000});
    du.on_uplink_frame(std::vector<std::uint8_t>(30, 0xff), ota);

    const du_counters k = du.snapshot_counters();
    CHECK(k.ul_on_time == 4);
    CHECK(k.ul_late == 1);
    CHECK(k.ul_early == 1);
    CHECK(k.ul_duplicates == 1);
    CHECK(k.ul_seq_gaps == 3);
    CHECK(k.ul_decode_errors == 1);
    CHECK(k.lambda_count == 6);
    CHECK(k.lambda_min_us == 924);
    CHECK(k.lambda_max_us == 1326);

    REQUIRE(got.size() == 3);
    CHECK(got[0].absolute_slot == 9);
    CHECK(got[0].symbol == 3);
    CHECK(got[0].start_prb == 4);
    CHECK(got[0].values.size() == 24);
    CHECK(got[0].values[0] == cf_t{0.5, -0.25});

    // PRACH deliveries are trimmed to the sequence length
    got.clear();
    du.on_uplink_frame(ul_frame(c, 19, 1, 1, filter_index::prach, 12), c.timebase.ota_time(19) + usec{1102});
    REQUIRE(got.size() == 1);
    CHECK(got[0].prach);
    CHECK(got[0].values.size() == 139);
    CHECK(du.snapshot_counters().ul_prach_frames == 1);
}

TEST_CASE("QPSK fill is seeded and confined to the ranges")
{
    resource_grid a(slot_point(1, 0), 2, 51);
    resource_grid b(slot_point(1, 0), 2, 51);
    const std::vector<prb_range> r{{2, 3}};
    fill_qpsk(a, 9, 5, 1, r);
    fill_qpsk(b, 9, 5, 1, r);
    resource_grid other(slot_point(1, 0), 2, 51);
    fill_qpsk(other, 9, 6, 1, r);
    bool differs = false;
    for (unsigned s = 0; s != 14; ++s) {
        for (unsigned k = 0; k != 612; ++k) {
            CHECK(a.at(s, k, 1) == b.at(s, k, 1));
            const bool inside = k >= 24 && k < 60;
            CHECK((std::abs(a.at(s, k, 1)) > 0) == inside);
            if (inside) {
                CHECK(std::abs(a.at(s, k, 1).real()) == doctest::Approx(0.5 / std::sqrt(2.0)));
                differs = differs || a.at(s, k, 0) != other.at(s, k, 0);
            }
        }
    }
    CHECK(differs);
}
