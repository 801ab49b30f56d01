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

#include "codec_gen.hpp"
#include "oracles.hpp"
#include "ofhsim/ofh_codec.hpp"

#include <doctest.h>

#include <random>

using namespace ofhsim;

namespace {

const codec_config cfg{1, 51, {}};

std::vector<std::uint8_t> golden(const char* name)
{
    return oracle::read_file(std::string(OFHSIM_TESTDATA_DIR) + "/" + name);
}

cplane_message golden_type1()
{
    cplane_message m;
    m.app.direction = data_direction::downlink;
    m.section_type  = 1;
    m.comp          = {comp_method::bfp, 9};
    cplane_section s;
    s.section_id = 1;
    s.start_prb  = 0;
    s.num_prb    = 51;
    s.num_symbol = 14;
    m.sections.push_back(s);
    return m;
}

cplane_message golden_type3()
{
    cplane_message m;
    m.app.direction       = data_direction::uplink;
    m.app.filter_index    = filter_index::prach;
    m.app.frame_id        = 5;
    m.app.subframe_id     = 9;
    m.app.slot_id         = 1;
    m.section_type        = 3;
    m.comp                = {comp_method::bfp, 9};
    cplane_section s;
    s.section_id = 0x200;
    s.num_prb    = 12;
    s.num_symbol = 12;
    s.prach      = prach_section_fields{0, 0, 0, -612};
    m.sections.push_back(s);
    return m;
}

uplane_message golden_uplane(comp_params comp)
{
    uplane_message m;
    m.app.frame_id        = 2;
    m.app.subframe_id     = 3;
    m.app.slot_id         = 1;
    m.app.start_symbol_id = 6;
    uplane_section s;
    s.section_id = 1;
    s.start_prb  = 7;
    s.num_prb    = 1;
    s.comp       = comp;
    compressed_prb prb;
    prb.params = comp;
    for (int i = 0; i != 24; ++i) {
        if (comp.meth == comp_method::none) {
            prb.mantissas[i] = static_cast<std::int16_t>(1000 * (i - 12));
        } else {
            prb.exponent     = 3;
            prb.mantissas[i] = static_cast<std::int16_t>(20 * i - 240);
        }
    }
    s.prbs.push_back(prb);
    m.sections.push_back(s);
    return m;
}

} // namespace

TEST_CASE("golden vectors byte-match the encoder and decode back")
{
    const auto c1 = golden("cplane_type1.bin");
    CHECK(encode_cplane(golden_type1(), {}, 0, cfg) == c1);
    const auto d1 = decode_cplane(c1, cfg);
    CHECK(d1.msg == golden_type1());
    CHECK(d1.header.msg_type == ecpri_msg_type::rt_control);
    CHECK(d1.header.payload_size == 20);

    const eaxc_id e3{1, 0, 0, 1};
    const auto    c3 = golden("cplane_type3.bin");
    CHECK(encode_cplane(golden_type3(), e3, 17, cfg) == c3);
    const auto d3 = decode_cplane(c3, cfg);
    CHECK(d3.msg == golden_type3());
    CHECK(d3.header.eaxc == e3);
    CHECK(d3.header.seq_id == 17);

    const auto un = golden("uplane_none.bin");
    CHECK(un.size() == 8 + 4 + 6 + 48);
    CHECK(encode_uplane(golden_uplane({comp_method::none, 16}), {0, 0, 0, 1}, 3, cfg) == un);
    CHECK(decode_uplane(un, cfg).msg == golden_uplane({comp_method::none, 16}));

    const auto ub = golden("uplane_bfp9.bin");
    CHECK(ub.size() == 8 + 4 + 6 + 28);
    CHECK(encode_uplane(golden_uplane({comp_method::bfp, 9}), {0, 0, 0, 1}, 4, cfg) == ub);
    CHECK(decode_uplane(ub, cfg).msg == golden_uplane({comp_method::bfp, 9}));
}

TEST_CASE("decode errors on damaged golden frames")
{
    auto c1 = golden("cplane_type1.bin");
    try {
        decode_frame(std::span(c1).first(c1.size() - 1), cfg);
        FAIL("truncated frame decoded");
    } catch (const decode_error& e) {
        CHECK(e.code() == decode_errc::truncated);
    }
    c1[8 + 5] = 5;
    try {
        decode_frame(c1, cfg);
        FAIL("section type 5 decoded");
    } catch (const decode_error& e) {
        CHECK(e.code() == decode_errc::unsupported_section_type);
    }

    auto ub = golden("uplane_bfp9.bin");
    ub[8 + 4 + 3] = 2; // num_prb 2 with one PRB of payload
    try {
        decode_frame(ub, cfg);
        FAIL("short payload decoded");
    } catch (const decode_error& e) {
        CHECK(e.code() == decode_errc::length_mismatch);
    }
}

TEST_CASE("padding policy")
{
    auto c1 = golden("cplane_type1.bin");
    c1.resize(MIN_PADDED_FRAME, 0);
    CHECK(decode_cplane(c1, cfg).msg == golden_type1());
    c1.back() = 1;
    CHECK_THROWS_AS(decode_cplane(c1, cfg), decode_error);
    c1.back() = 0;
    c1.push_back(0);
    CHECK_THROWS_AS(decode_cplane(c1, cfg), decode_error);
}

TEST_CASE("encoder field checks")
{
    cplane_message m = golden_type1();
    m.sections[0].start_prb = 1024;
    try {
        encode_cplane(m, {}, 0, {1, 2000, {}});
        FAIL("start_prb 1024 encoded");
    } catch (const encode_error& e) {
        CHECK(e.field() == "start_prb");
    }
    m                        = golden_type1();
    m.sections[0].num_prb    = 52;
    CHECK_THROWS_AS(encode_cplane(m, {}, 0, cfg), encode_error);
    m                        = golden_type1();
    m.app.slot_id            = 2;
    CHECK_THROWS_AS(encode_cplane(m, {}, 0, cfg), encode_error);
    m                        = golden_type1();
    m.sections.clear();
    CHECK_THROWS_AS(encode_cplane(m, {}, 0, cfg), encode_error);
    m              = golden_type1();
    m.section_type = 3;
    CHECK_THROWS_AS(encode_cplane(m, {}, 0, cfg), encode_error);
    CHECK_THROWS_AS(encode_cplane(golden_type1(), {16, 0, 0, 0}, 0, cfg), encode_error);
}

TEST_CASE("eAxC packing")
{
    const eaxc_layout l;
    CHECK(eaxc_id{1, 2, 3, 4}.pack(l) == 0x1234);
    CHECK(eaxc_id::unpack(0xabcd, l) == eaxc_id{0xa, 0xb, 0xc, 0xd});
    const eaxc_layout narrow{2, 2, 2, 10};
    CHECK(eaxc_id::unpack(eaxc_id{3, 1, 2, static_cast<std::uint8_t>(1000 & 0xff)}.pack(narrow), narrow) == eaxc_id{3, 1, 2, 0xe8});
    CHECK_THROWS(eaxc_layout{4, 4, 4, 3}.validate());
}

TEST_CASE("randomized round trips")
{
    std::mt19937_64 rng(2024);
    for (const codec_config& c : {codec_config{1, 51, {}}, codec_config{0, 106, {}}}) {
        for (int i = 0; i != 5000; ++i) {
            const eaxc_id      e{static_cast<std::uint8_t>(rng() % 16), static_cast<std::uint8_t>(rng() % 16),
                                 static_cast<std::uint8_t>(rng() % 16), static_cast<std::uint8_t>(rng() % 16)};
            const auto         seq = static_cast<std::uint8_t>(rng());
            if (i % 2 == 0) {
                const cplane_message m     = gen::random_cplane(rng, c);
                const auto           bytes = encode_cplane(m, e, seq, c);
                const auto           d     = std::get<decoded_cplane>(decode_frame(bytes, c));
                REQUIRE(d.msg == m);
                CHECK(d.header.eaxc == e);
                CHECK(d.header.seq_id == seq);
                CHECK(peek_app_header(bytes) == m.app);
            } else {
                const uplane_message m     = gen::random_uplane(rng, c);
                const auto           bytes = encode_uplane(m, e, seq, c);
                const auto           d     = std::get<decoded_uplane>(decode_frame(bytes, c));
                REQUIRE(d.msg == m);
                CHECK(d.header.seq_id == seq);
                CHECK(decode_header(bytes, c).payload_size == bytes.size() - 4);
            }
        }
    }
}

TEST_CASE("structured fuzz never escapes decode_error")
{
    std::mt19937_64                        rng(99);
    std::vector<std::vector<std::uint8_t>> seeds;
    for (const char* g : {"cplane_type1.bin", "cplane_type3.bin", "uplane_none.bin", "uplane_bfp9.bin"}) {
        seeds.push_back(golden(g));
    }
    for (int i = 0; i != 20; ++i) {
        seeds.push_back(encode_cplane(gen::random_cplane(rng, cfg), {}, 0, cfg));
        seeds.push_back(encode_uplane(gen::random_uplane(rng, cfg), {}, 0, cfg));
    }
    std::uint64_t accepted = 0;
    for (int i = 0; i != 100'000; ++i) {
        std::vector<std::uint8_t> f = seeds[rng() % seeds.size()];
        switch (rng() % 5) {
            case 0: // bit flips
                for (unsigned k = 0, n = 1 + rng() % 4; k != n; ++k) {
                    f[rng() % f.size()] ^= static_cast<std::uint8_t>(1U << (rng() % 8));
                }
                break;
            case 1: // truncate
                f.resize(rng() % f.size());
                break;
            case 2: // extend
                for (unsigned k = 0, n = 1 + rng() % 64; k != n; ++k) {
                    f.push_back(static_cast<std::uint8_t>(rng() % 3 == 0 ? rng() : 0));
                }
                break;
            case 3: // random header-region bytes
                for (unsigned k = 0, n = 1 + rng() % 6; k != n; ++k) {
                    f[rng() % std::min<std::size_t>(f.size(), 24)] = static_cast<std::uint8_t>(rng());
                }
                break;
            default: // pure noise
                f.resize(rng() % 200);
                for (auto& b : f) {
                    b = static_cast<std::uint8_t>(rng());
                }
                break;
        }
        try {
            decode_frame(f, cfg);
            ++accepted;
        } catch (const decode_error&) {
        } catch (const std::exception& e) {
            FAIL("non-decode exception: " << e.what());
        }
    }
    CHECK(accepted > 0);
}

TEST_CASE("sequence tracker")
{
    using enum seq_status;
    sequence_tracker t;
    auto             tr = [&](std::uint8_t s) { return t.track(1, data_direction::uplink, ofh_plane::user, s); };
    CHECK(tr(0) == seq_result{in_order, 0});
    CHECK(tr(1) == seq_result{in_order, 0});
    CHECK(tr(1) == seq_result{duplicate, 0});
    CHECK(tr(2) == seq_result{in_order, 0});
    CHECK(tr(5) == seq_result{gap, 2});
    CHECK(tr(6) == seq_result{in_order, 0});

    sequence_tracker w;
    for (unsigned s = 0; s != 600; ++s) {
        CHECK(w.track(2, data_direction::downlink, ofh_plane::control, static_cast<std::uint8_t>(s)).status == in_order);
    }
    // streams are independent
    CHECK(w.track(2, data_direction::downlink, ofh_plane::user, 77).status == in_order);
    CHECK(w.track(3, data_direction::downlink, ofh_plane::control, 9).status == in_order);
    // 600 mod 256 = 88 expected; 87 is one behind, 88 + 127 ahead
    CHECK(w.track(2, data_direction::downlink, ofh_plane::control, 87).status == duplicate);
    CHECK(w.track(2, data_direction::downlink, ofh_plane::control, 88 + 127) == seq_result{gap, 127});
}
