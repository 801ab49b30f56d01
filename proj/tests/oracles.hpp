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

// Independent reference computations shared by the unit tests and the acceptance runner. Nothing here calls the
// code it is used to check.

#pragma once

#include "ofhsim/timing.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

/// Forward slot distance by stepping src one slot at a time.
inline std::uint32_t brute_slot_diff(ofhsim::slot_point src, const ofhsim::slot_point& dst)
{
    std::uint32_t n = 0;
    while (!(src == dst)) {
        ++src;
        ++n;
    }
    return n;
}

/// Normal-CP symbol length in samples, from the basic time unit Tc = 1 / (480 kHz * 4096).
inline std::uint64_t symbol_samples(unsigned mu, std::uint64_t rate_hz, unsigned symbol_in_subframe)
{
    const double   kappa_tc = 1.0 / (480e3 * 4096.0);
    const unsigned half     = 7U << mu;
    double         n_tc     = (2048.0 + 144.0) * 64.0 / std::ldexp(1.0, static_cast<int>(mu));
    if (symbol_in_subframe % half == 0) {
        n_tc += 16.0 * 64.0;
    }
    return static_cast<std::uint64_t>(std::llround(n_tc * kappa_tc * static_cast<double>(rate_hz)));
}

/// Sample tick of (system_slot, symbol, sample) on the hyperframe, summing symbol lengths one by one.
inline std::uint64_t sample_of(unsigned mu, std::uint64_t rate_hz, std::uint32_t system_slot, unsigned symbol,
                               unsigned sample)
{
    const unsigned      slots_per_sf = 1U << mu;
    const std::uint64_t per_sf       = rate_hz / 1000;
    std::uint64_t       t            = static_cast<std::uint64_t>(system_slot / slots_per_sf) * per_sf;
    const unsigned      first_sym    = (system_slot % slots_per_sf) * ofhsim::NOF_SYMBOLS_PER_SLOT;
    for (unsigned s = 0; s != first_sym + symbol; ++s) {
        t += symbol_samples(mu, rate_hz, s);
    }
    return t + sample;
}

/// Half-away-from-zero division by 2^e with clamping, the textbook BFP mantissa.
inline std::int32_t bfp_mantissa(std::int32_t v, unsigned e, unsigned width)
{
    const double       q  = std::ldexp(static_cast<double>(v), -static_cast<int>(e));
    const auto         r  = static_cast<std::int32_t>(q < 0 ? -std::floor(-q + 0.5) : std::floor(q + 0.5));
    const std::int32_t lo = -(1 << (width - 1));
    const std::int32_t hi = (1 << (width - 1)) - 1;
    return r < lo ? lo : (r > hi ? hi : r);
}

/// Smallest e such that every value, shifted right by e, fits a signed width-bit field (found by search).
inline unsigned bfp_exponent(const std::vector<std::int32_t>& values, unsigned width)
{
    for (unsigned e = 0; e != 16; ++e) {
        bool fits = true;
        for (std::int32_t v : values) {
            // floor division keeps -2^(w-1) representable
            const std::int64_t s = static_cast<std::int64_t>(std::floor(std::ldexp(static_cast<double>(v), -static_cast<int>(e))));
            if (s < -(std::int64_t{1} << (width - 1)) || s > (std::int64_t{1} << (width - 1)) - 1) {
                fits = false;
                break;
            }
        }
        if (fits) {
            return e;
        }
    }
    return 16;
}

/// Time-domain samples of a single subcarrier tone for one CP-extended symbol, computed directly.
inline std::vector<std::complex<double>> tone_symbol(int bin, double amplitude, unsigned fft_size, unsigned cp)
{
    std::vector<std::complex<double>> out(fft_size + cp);
    for (unsigned i = 0; i != out.size(); ++i) {
        const double n  = static_cast<double>(i) - static_cast<double>(cp);
        const double ph = 2.0 * M_PI * static_cast<double>(bin) * n / static_cast<double>(fft_size);
        out[i]          = amplitude / static_cast<double>(fft_size) * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return out;
}

inline std::vector<std::uint8_t> read_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open " + path);
    }
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

} // namespace oracle
