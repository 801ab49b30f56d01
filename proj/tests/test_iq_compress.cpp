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
#include "ofhsim/iq_compress.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace ofhsim;

namespace {

iq_block filled(std::int16_t v)
{
    iq_block b{};
    b.fill(v);
    return b;
}

iq_block random_block(std::mt19937_64& rng)
{
    // random magnitude range so every exponent gets exercised
    const unsigned bits = 1 + static_cast<unsigned>(rng() % 16);
    iq_block       b{};
    for (auto& v : b) {
        const std::int64_t span = std::int64_t{1} << bits;
        v = static_cast<std::int16_t>(std::clamp<std::int64_t>(static_cast<std::int64_t>(rng() % span) - span / 2, -32768, 32767));
    }
    return b;
}

} // namespace

TEST_CASE("bits_required")
{
    CHECK(bits_required(0) == 0);
    CHECK(bits_required(1) == 1);
    CHECK(bits_required(-1) == 0);
    CHECK(bits_required(255) == 8);
    CHECK(bits_required(-256) == 8);
    CHECK(bits_required(256) == 9);
    CHECK(bits_required(32767) == 15);
    CHECK(bits_required(-32768) == 15);
}

TEST_CASE("compress examples")
{
    const comp_params w9{comp_method::bfp, 9};
    const auto        z = compress(filled(0), w9);
    CHECK(z.exponent == 0);
    CHECK(z.mantissas == filled(0));
    CHECK(decompress(z) == filled(0));

    iq_block b = filled(0);
    b[5]       = 255;
    b[6]       = -255;
    CHECK(compress(b, w9).exponent == 0);
    CHECK(decompress(compress(b, w9)) == b);

    b[7]             = 32767;
    const auto c     = compress(b, w9);
    CHECK(c.exponent == 7);
    CHECK(c.mantissas[7] == 255);
    CHECK(decompress(c)[7] == 32640);

    CHECK(prb_block_size({comp_method::none, 16}) == 48);
    CHECK(prb_block_size({comp_method::bfp, 9}) == 28);
    CHECK(prb_block_size({comp_method::bfp, 8}) == 25);
    CHECK_THROWS_AS(compress(b, {comp_method::bfp, 17}), std::invalid_argument);
    CHECK_THROWS_AS(compress(b, {comp_method::none, 9}), std::invalid_argument);
}

TEST_CASE("exhaustive single-value scan against the textbook quantizer")
{
    for (unsigned width : {2U, 5U, 9U, 12U, 16U}) {
        const comp_params p{comp_method::bfp, width};
        for (std::int32_t v = -32768; v <= 32767; ++v) {
            const iq_block b = filled(static_cast<std::int16_t>(v));
            const auto     c = compress(b, p);
            const unsigned e = oracle::bfp_exponent({v}, width);
            if (c.exponent != e || c.mantissas[0] != oracle::bfp_mantissa(v, e, width)) {
                FAIL("width " << width << " v " << v << ": got e=" << int(c.exponent) << " m=" << c.mantissas[0]);
            }
            const std::int32_t err   = std::abs(v - decompress(c)[0]);
            const std::int32_t bound = e == 0 ? 0 : 1 << (e - 1);
            const bool clamped = oracle::bfp_mantissa(v, e, 24) != oracle::bfp_mantissa(v, e, width);
            if (err > bound && !(clamped && err <= (1 << e))) {
                FAIL("width " << width << " v " << v << ": error " << err);
            }
        }
    }
}

TEST_CASE("random blocks: error bound, lossless range, full width")
{
    std::mt19937_64 rng(3);
    for (unsigned width = 2; width <= 16; ++width) {
        const comp_params p{comp_method::bfp, width};
        for (int i = 0; i != 2000; ++i) {
            const iq_block b   = random_block(rng);
            const auto     c   = compress(b, p);
            const iq_block out = decompress(c);
            std::int32_t   mx  = 0;
            for (std::int16_t v : b) {
                mx = std::max(mx, std::abs(static_cast<std::int32_t>(v)));
            }
            for (std::size_t k = 0; k != b.size(); ++k) {
                const std::int32_t err   = std::abs(b[k] - out[k]);
                const std::int32_t half  = c.exponent == 0 ? 0 : 1 << (c.exponent - 1);
                const bool         clamp = c.mantissas[k] == (1 << (width - 1)) - 1;
                CHECK((err <= half || (clamp && err <= (1 << c.exponent))));
            }
            if (mx < (1 << (width - 1))) {
                CHECK(out == b);
            }
            if (width == 16) {
                CHECK(c.exponent == 0);
                CHECK(out == b);
            }
            std::vector<std::uint8_t> bytes;
            pack_prb(c, bytes);
            CHECK(bytes.size() == prb_block_size(p));
            CHECK(unpack_prb(bytes, p) == c);
        }
    }
}

TEST_CASE("packing layout")
{
    compressed_prb c;
    c.params   = {comp_method::bfp, 4};
    c.exponent = 0xa;
    for (std::size_t i = 0; i != c.mantissas.size(); ++i) {
        c.mantissas[i] = static_cast<std::int16_t>(static_cast<int>(i % 16) - 8);
    }
    std::vector<std::uint8_t> bytes;
    pack_prb(c, bytes);
    REQUIRE(bytes.size() == 13);
    CHECK(bytes[0] == 0x0a);
    // -8, -7 as nibbles: 1000 1001
    CHECK(bytes[1] == 0x89);
    CHECK(bytes[12] == 0xef);

    compressed_prb raw;
    raw.params       = {comp_method::none, 16};
    raw.mantissas[0] = -2;
    bytes.clear();
    pack_prb(raw, bytes);
    REQUIRE(bytes.size() == 48);
    CHECK(bytes[0] == 0xff);
    CHECK(bytes[1] == 0xfe);
    CHECK_THROWS(unpack_prb(std::span(bytes).first(47), raw.params));
}
