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
#include "ofhsim/udp_link.hpp"

#include <doctest.h>

using namespace ofhsim;

namespace {

scenario small_tdd(unsigned frames = 2)
{
    scenario sc = default_tdd_scenario();
    sc.n_frames = frames;
    return sc;
}

} // namespace

TEST_CASE("link model sampling")
{
    fronthaul_link fixed(link_model{usec{30}, jitter_kind::none, {}, {}, {}, 0.0, 1});
    CHECK(fixed.sample() == usec{30});

    fronthaul_link u(link_model::from_bounds(usec{10}, usec{50}, jitter_kind::uniform, 4));
    usec lo{1000};
    usec hi{0};
    for (int i = 0; i != 5000; ++i) {
        const auto d = u.sample();
        REQUIRE(d);
        lo = std::min(lo, *d);
        hi = std::max(hi, *d);
    }
    CHECK(lo == usec{10});
    CHECK(hi == usec{50});

    link_model seq;
    seq.jitter   = jitter_kind::sequence;
    seq.sequence = {usec{1}, usec{5}};
    fronthaul_link s(seq);
    CHECK(s.sample() == usec{1});
    CHECK(s.sample() == usec{5});
    CHECK(s.sample() == usec{1});

    link_model lossy;
    lossy.drop_rate = 1.0;
    CHECK_FALSE(fronthaul_link(lossy).sample());

    link_model broken;
    broken.jitter = jitter_kind::sequence;
    CHECK_THROWS_AS(fronthaul_link{broken}, scenario_error);
}

TEST_CASE("event queue orders by time, phase, insertion")
{
    event_queue      q;
    std::vector<int> order;
    q.schedule(usec{10}, event_phase::air, [&] { order.push_back(4); });
    q.schedule(usec{10}, event_phase::frame, [&] { order.push_back(2); });
    q.schedule(usec{10}, event_phase::du_boundary, [&] { order.push_back(1); });
    q.schedule(usec{5}, event_phase::pool_wake, [&] {
        order.push_back(0);
        q.schedule(usec{10}, event_phase::frame, [&] { order.push_back(3); });
    });
    q.run();
    CHECK(order == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(q.executed() == 5);
    CHECK(q.now() == usec{10});
    CHECK_THROWS_AS(q.schedule(usec{9}, event_phase::frame, [] {}), std::logic_error);
}

TEST_CASE("ideal TDD run is clean")
{
    const run_result r = run(small_tdd());
    CHECK(r.integrity.passed());
    CHECK(r.integrity.dl_slots_checked == 32);
    CHECK(r.integrity.ul_sections_expected > 0);
    CHECK(r.integrity.prach_symbols_expected == 2 * 2 * 12);
    CHECK(r.direction_mismatches == 0);
    CHECK(r.ta3.violations == 0);
    CHECK(r.ta3.frames == r.ru.ul_frames_enqueued);
    CHECK(r.ru.cplane_dl.on_time == r.du.cplane_dl_sent);
    CHECK(r.ru.uplane_dl.on_time == r.du.uplane_dl_sent);
    CHECK(r.ru.cplane_ul.on_time == r.du.cplane_ul_sent);
    CHECK(r.du.ul_on_time == r.ru.ul_frames_enqueued);
    CHECK(r.du.ul_late + r.du.ul_early + r.du.ul_seq_gaps + r.du.ul_duplicates == 0);
    CHECK(r.du.lambda_min_us == 1102);
    CHECK(r.ru.rg_acquired == r.ru.rg_released);
}

TEST_CASE("jitter keeps per-stream order and stays in bounds")
{
    scenario sc   = small_tdd(4);
    sc.fh         = {usec{0}, usec{40}, usec{0}, usec{30}};
    sc.jitter     = jitter_kind::uniform;
    sc.du_profile = derive_du_profile(sc.ru_profile, sc.fh);
    const run_result r = run(sc);
    CHECK(r.integrity.passed());
    CHECK(r.du.ul_seq_gaps == 0);
    CHECK(r.du.ul_duplicates == 0);
    CHECK(r.link.dl_min_delay >= usec{0});
    CHECK(r.link.dl_max_delay <= usec{40});
    CHECK(r.link.ul_max_delay <= usec{30});
    CHECK(r.link.dl_max_delay > r.link.dl_min_delay);
}

TEST_CASE("dropped frames surface as gaps and missing data")
{
    scenario sc  = small_tdd(2);
    sc.drop_rate = 0.02;
    const run_result r = run(sc);
    const std::uint64_t dropped =
        r.link.cplane_dl_dropped + r.link.cplane_ul_dropped + r.link.uplane_dl_dropped + r.link.uplane_ul_dropped;
    CHECK(dropped > 0);
    CHECK_FALSE(r.integrity.passed());
    CHECK(r.du.ul_seq_gaps >= r.link.uplane_ul_dropped - 2);
}

TEST_CASE("a U-plane delay past t2a_min_up is dropped late")
{
    scenario sc              = small_tdd(1);
    sc.uplane_dl_extra_delay = usec{306};
    const run_result r       = run(sc);
    CHECK(r.ru.uplane_dl.late_dropped == r.du.uplane_dl_sent);
    CHECK(r.ru.uplane_dl.on_time == 0);
    CHECK(r.ru.cplane_dl.late_dropped == 0);
    CHECK(r.ru.cplane_ul.late_dropped == 0);
}

TEST_CASE("FDD run is clean")
{
    scenario sc = default_fdd_scenario();
    sc.n_frames = 2;
    const run_result r = run(sc);
    CHECK(r.integrity.passed());
    CHECK(r.du.dl_slots_scheduled == 20);
    CHECK(r.du.ul_slots_scheduled == 20);
    CHECK(r.direction_mismatches == 0);
}

TEST_CASE("RU clock offset inside the window margins stays clean")
{
    scenario sc        = small_tdd(2);
    sc.ru_clock_offset = usec{50};
    CHECK(run(sc).integrity.passed());
}

TEST_CASE("replay reproduces the RU counters")
{
    const scenario   sc = small_tdd(2);
    const run_result r  = run(sc);
    CHECK(replay(r.capture, sc.make_ru_config()).same_reception(r.ru));
    const run_result again = run(sc);
    CHECK(again.capture.serialize() == r.capture.serialize());
}

TEST_CASE("inconsistent scenarios fail before running")
{
    scenario sc                = small_tdd(1);
    sc.scheduling_offset_slots = 2;
    CHECK_THROWS_AS(run(sc), scenario_error);
}

TEST_CASE("live loopback smoke test")
{
    // wall-clock mode: only delivery and capture are asserted, window verdicts depend on host speed
    live_options opt;
    opt.n_slots         = 10;
    const live_result r = run_live(default_tdd_scenario(), opt);
    CHECK(r.datagrams_sent > 0);
    CHECK(r.datagrams_received >= 1);
    CHECK(r.capture.records.size() == r.datagrams_received);
}
