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

#include "ofhsim/iq_compress.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace ofhsim {

void comp_params::validate() const
{
    if (width < 1 || width > 16) {
        throw std::invalid_argument("iq_width " + std::to_string(width) + " outside [1, 16]");
    }
    if (meth == comp_method::none && width != 16) {
        throw std::invalid_argument("uncompressed IQ must use width 16");
    }
    if (meth != comp_method::none && meth != comp_method::bfp) {
        throw std::invalid_argument("unsupported compression method");
    }
}

unsigned bits_required(std::int32_t v)
{
    const auto magnitude = static_cast<std::uint32_t>(v >= 0 ? v : -(v + 1));
    return static_cast<unsigned>(std::bit_width(magnitude));
}

compressed_prb compress(const iq_block& block, const comp_params& params)
{
    params.validate();
    compressed_prb out;
    out.params = params;
    if (params.meth == comp_method::none) {
        out.mantissas = block;
        return out;
    }

    unsigned needed = 0;
    for (std::int16_t v : block) {
        needed = std::max(needed, bits_required(v));
    }
    const unsigned e = needed > params.width - 1 ? needed - (params.width - 1) : 0;
    out.exponent     = static_cast<std::uint8_t>(e);

    const std::int32_t lo = -(1 << (params.width - 1));
    const std::int32_t hi = (1 << (params.width - 1)) - 1;
    for (std::size_t i = 0; i != block.size(); ++i) {
        const std::int32_t v = block[i];
        std::int32_t       m = v;
        if (e > 0) {
            const std::int32_t half = 1 << (e - 1);
            const std::int32_t mag  = (std::abs(v) + half) >> e;
            m                       = v < 0 ? -mag : mag;
        }
        out.mantissas[i] = static_cast<std::int16_t>(std::clamp(m, lo, hi));
    }
    return out;
}

iq_block decompress(const compressed_prb& prb)
{
    if (prb.params.meth == comp_method::none) {
        return prb.mantissas;
    }
    iq_block out{};
    for (std::size_t i = 0; i != out.size(); ++i) {
        const std::int32_t v = static_cast<std::int32_t>(prb.mantissas[i]) * (1 << prb.exponent);
        out[i]               = static_cast<std::int16_t>(std::clamp(v, -32768, 32767));
    }
    return out;
}

std::size_t prb_block_size(const comp_params& params)
{
    params.validate();
    if (params.meth == comp_method::none) {
        return IQ_VALUES_PER_PRB * 2;
    }
    return 1 + (IQ_VALUES_PER_PRB * params.width + 7) / 8;
}

void pack_prb(const compressed_prb& prb, std::vector<std::uint8_t>& out)
{
    if (prb.params.meth == comp_method::none) {
        for (std::int16_t v : prb.mantissas) {
            const auto u = static_cast<std::uint16_t>(v);
            out.push_back(static_cast<std::uint8_t>(u >> 8));
            out.push_back(static_cast<std::uint8_t>(u & 0xff));
        }
        return;
    }

    out.push_back(prb.exponent & 0x0f);
    const unsigned width = prb.params.width;
    const auto     mask  = static_cast<std::uint32_t>((1U << width) - 1);
    std::uint32_t  acc   = 0;
    unsigned       nbits = 0;
    for (std::int16_t v : prb.mantissas) {
        acc = (acc << width) | (static_cast<std::uint32_t>(v) & mask);
        nbits += width;
        while (nbits >= 8) {
            nbits -= 8;
            out.push_back(static_cast<std::uint8_t>(acc >> nbits));
        }
        acc &= (1U << nbits) - 1;
    }
    if (nbits > 0) {
        out.push_back(static_cast<std::uint8_t>(acc << (8 - nbits)));
    }
}

compressed_prb unpack_prb(std::span<const std::uint8_t> bytes, const comp_params& params)
{
    if (bytes.size() != prb_block_size(params)) {
        throw std::invalid_argument("PRB block has " + std::to_string(bytes.size()) + " bytes, expected " +
                                    std::to_string(prb_block_size(params)));
    }
    compressed_prb prb;
    prb.params = params;
    if (params.meth == comp_method::none) {
        for (std::size_t i = 0; i != IQ_VALUES_PER_PRB; ++i) {
            prb.mantissas[i] = static_cast<std::int16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
        }
        return prb;
    }

    prb.exponent         = bytes[0] & 0x0f;
    const unsigned width = params.width;
    std::uint32_t  acc   = 0;
    unsigned       nbits = 0;
    std::size_t    pos   = 1;
    for (auto& m : prb.mantissas) {
        while (nbits < width) {
            acc = (acc << 8) | bytes[pos++];
            nbits += 8;
        }
        nbits -= width;
        const std::uint32_t raw = (acc >> nbits) & ((1U << width) - 1);
        acc &= (1U << nbits) - 1;
        // Sign-extend from width bits.
        const std::int32_t sign = 1 << (width - 1);
        m                       = static_cast<std::int16_t>((static_cast<std::int32_t>(raw) ^ sign) - sign);
    }
    return prb;
}

} // namespace ofhsim
