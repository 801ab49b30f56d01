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

#include "oracles.hpp"
#include "ofhsim/timing.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace ofhsim;

namespace {

const numerology_config tdd = numerology_config::make(30, 23'040'000, 51);
const numerology_config fdd = numerology_config::make(15, 23'040'000, 106);

} // namespace

TEST_CASE("numerology derivation")
{
    CHECK(tdd.mu == 1);
    CHECK(tdd.fft_size == 768);
    CHECK(tdd.samples_per_slot() == 11520);
    CHECK(tdd.slot_duration() == usec{500});
    CHECK(fdd.mu == 0);
    CHECK(fdd.fft_size == 1536);
    CHECK(fdd.slot_duration() == usec{1000});

    const numerology_config lte = numerology_config::make(15, 30'720'000, 106);
    CHECK(lte.fft_size == 2048);

    CHECK_THROWS_AS(numerology_config::make(60, 23'040'000, 51), timing_error);
    CHECK_THROWS_AS(numerology_config::make(30, 23'040'000, 300), timing_error);
}

TEST_CASE("symbol sizes follow the normal cyclic prefix structure")
{
    const auto s1 = symbol_sizes_for(1, 23'040'000);
    REQUIRE(s1.size() == 28);
    for (unsigned i = 0; i != 28; ++i) {
        CHECK(s1[i] == (i == 0 || i == 14 ? 834U : 822U));
        CHECK(s1[i] == oracle::symbol_samples(1, 23'040'000, i));
    }
    CHECK(std::accumulate(s1.begin(), s1.end(), 0U) == 23040U);

    const auto s0 = symbol_sizes_for(0, 30'720'000);
    REQUIRE(s0.size() == 14);
    CHECK(s0[0] == 2048U + 160U);
    for (unsigned i = 1; i != 14; ++i) {
        CHECK(s0[i] == (i == 7 ? 2048U + 160U : 2048U + 144U));
    }
    CHECK(std::accumulate(s0.begin(), s0.end(), 0U) == 30720U);

    CHECK_THROWS_AS(symbol_sizes_for(1, 1'000'000), timing_error);
}

TEST_CASE("align_start_time rounds up to the next subframe")
{
    CHECK(align_start_time({0}, tdd).ticks == 0);
    CHECK(align_start_time({23040}, tdd).ticks == 23040);
    CHECK(align_start_time({100}, tdd).ticks == 23040);
    for (std::uint64_t t : {1ULL, 23039ULL, 23041ULL, 999'999ULL}) {
        const auto a = align_start_time({t}, tdd);
        CHECK(a.ticks >= t);
        CHECK(a.ticks % 23040 == 0);
        CHECK(align_start_time(a, tdd) == a);
    }
}

TEST_CASE("slot_point_from_sample_time examples")
{
    auto p = slot_point_from_sample_time({0}, tdd);
    CHECK(p.slot.system_slot() == 0);
    CHECK(p.symbol_in_slot == 0);
    CHECK(p.sample_in_symbol == 0);

    p = slot_point_from_sample_time({23040}, tdd);
    CHECK(p.slot.sfn() == 0);
    CHECK(p.slot.subframe_index() == 1);
    CHECK(p.slot.slot_index() == 0);
    CHECK(p.slot.system_slot() == 2);

    p = slot_point_from_sample_time({23040ULL * 10240}, tdd);
    CHECK(p.slot.system_slot() == 0);
    CHECK(p.symbol_in_slot == 0);
}

TEST_CASE("slot_point_from_sample_time round-trips every sample of a subframe")
{
    for (const numerology_config* cfg : {&tdd, &fdd}) {
        const std::uint64_t per_sf = cfg->samples_per_subframe();
        // a subframe in the middle of the hyperframe and the very last one
        for (std::uint64_t base : {per_sf * 4321, per_sf * 10239}) {
            for (std::uint64_t i = 0; i != per_sf; ++i) {
                const auto p = slot_point_from_sample_time({base + i}, *cfg);
                const auto back =
                    oracle::sample_of(cfg->mu, cfg->sampling_rate_hz, p.slot.system_slot(), p.symbol_in_slot,
                                      p.sample_in_symbol);
                if (back != base + i) {
                    FAIL("round trip broke at tick " << base + i);
                }
            }
        }
    }
}

TEST_CASE("gps_slot_point")
{
    CHECK(gps_slot_point({0, 0}, tdd).system_slot() == 0);
    CHECK(gps_slot_point({0, 500'000}, tdd).system_slot() == 1);
    CHECK(gps_slot_point({10, 240'000'000}, fdd).system_slot() == 0);

    // one slot duration forward is exactly one system slot, over a subframe on a 1 us grid
    for (const numerology_config* cfg : {&tdd, &fdd}) {
        const std::int64_t slot_ns = cfg->slot_duration().count() * 1000;
        for (std::int64_t ns = 0; ns < 1'000'000; ns += 1000) {
            const auto a = gps_slot_point({3, static_cast<std::uint32_t>(ns)}, *cfg);
            const std::int64_t next = ns + slot_ns;
            const auto b = gps_slot_point({3 + next / 1'000'000'000, static_cast<std::uint32_t>(next % 1'000'000'000)}, *cfg);
            CHECK(calculate_slot_diff(a, b) == 1);
        }
    }
}

TEST_CASE("calculate_slot_diff matches stepping")
{
    const slot_point x(1, 1234);
    CHECK(calculate_slot_diff(x, x) == 0);
    CHECK(calculate_slot_diff(slot_point(1, 20479), slot_point(1, 0)) == 1);
    CHECK(calculate_slot_diff(slot_point(1, 0), slot_point(1, 3)) == 3);
    CHECK_THROWS_AS(calculate_slot_diff(slot_point(0, 1), slot_point(1, 1)), timing_error);

    std::mt19937_64 rng(11);
    for (unsigned mu : {0U, 1U}) {
        const std::uint32_t n = 10240U << mu;
        for (int i = 0; i != 500; ++i) {
            const slot_point a(mu, static_cast<std::uint32_t>(rng() % n));
            const slot_point b(mu, static_cast<std::uint32_t>(rng() % n));
            const auto       ab = calculate_slot_diff(a, b);
            CHECK(ab == oracle::brute_slot_diff(a, b));
            CHECK((ab + calculate_slot_diff(b, a)) % n == 0);
        }
    }
}

TEST_CASE("slot_point arithmetic wraps at the hyperframe")
{
    slot_point p(1, 20479);
    ++p;
    CHECK(p.system_slot() == 0);
    --p;
    CHECK(p.system_slot() == 20479);
    CHECK((p + 20480).system_slot() == 20479);
    CHECK((p + -20481).system_slot() == 20478);
    CHECK(slot_point::from_absolute(1, -1).system_slot() == 20479);
    CHECK(slot_point(1, 1023, 9, 1).system_slot() == 20479);
    CHECK_THROWS(slot_point(1, 1024, 0, 0));
    CHECK_THROWS(slot_point(1, 0, 0, 2));
}

TEST_CASE("alignment_offset")
{
    const slot_point g(1, 100);
    CHECK(alignment_offset(g, g, alignment_config{1}, tdd) == 1);
    const alignment_config lead = alignment_config::from_delay(default_rx_to_tx_max_delay, tdd.sampling_rate_hz);
    CHECK(lead.rx_to_tx_max_delay_samples == 23059);
    CHECK(alignment_offset(g, g, lead, tdd) == 3);
    CHECK(alignment_offset(slot_point(1, 98), g, alignment_config{3 * 11520}, tdd) == 5);
}

TEST_CASE("slot_timebase")
{
    const slot_timebase tb = slot_timebase::for_numerology(tdd, usec{5000});
    CHECK(tb.ota_time(0) == usec{5000});
    CHECK(tb.ota_time(-10) == usec{0});
    CHECK(tb.ota_ticks(3).ticks == 3 * 11520);
    CHECK(tb.slot_at(usec{5000}) == 0);
    CHECK(tb.slot_at(usec{5499}) == 0);
    CHECK(tb.slot_at(usec{4999}) == -1);
    CHECK(tb.slot_at(usec{0}) == -10);

    // wire fields resolve to the absolute slot closest to the reference
    for (std::int64_t abs : {std::int64_t{0}, std::int64_t{7}, std::int64_t{5119}, std::int64_t{5120}, std::int64_t{123457}}) {
        const slot_point p = tb.point(abs);
        for (std::int64_t ref : {abs - 40, abs, abs + 40}) {
            CHECK(tb.resolve(p.sfn() % 256, p.subframe_index(), p.slot_index(), ref) == abs);
        }
    }
}
