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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ofhsim {

/// 12 resource elements as interleaved I/Q pairs.
inline constexpr std::size_t IQ_VALUES_PER_PRB = 24;

using iq_block = std::array<std::int16_t, IQ_VALUES_PER_PRB>;

enum class comp_method : std::uint8_t { none = 0, bfp = 1 };

struct comp_params {
    comp_method meth  = comp_method::bfp;
    unsigned    width = 9;

    /// Throws std::invalid_argument when width is outside [1, 16] or none is paired with a width other than 16.
    void validate() const;
    friend bool operator==(const comp_params&, const comp_params&) = default;
};

struct compressed_prb {
    comp_params  params;
    std::uint8_t exponent = 0;
    /// Sign-extended mantissas (raw samples when params.meth == none).
    iq_block mantissas{};

    friend bool operator==(const compressed_prb&, const compressed_prb&) = default;
};

/// Magnitude bits needed so that v fits a two's-complement field of (result + 1) bits.
unsigned bits_required(std::int32_t v);

compressed_prb compress(const iq_block& block, const comp_params& params);
iq_block       decompress(const compressed_prb& prb);

std::size_t prb_block_size(const comp_params& params);

/// Serialises one PRB: for BFP the exponent byte (low nibble) comes first, then big-endian packed mantissas.
void           pack_prb(const compressed_prb& prb, std::vector<std::uint8_t>& out);
compressed_prb unpack_prb(std::span<const std::uint8_t> bytes, const comp_params& params);

} // namespace ofhsim
