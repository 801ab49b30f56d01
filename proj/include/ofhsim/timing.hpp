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

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ofhsim {

using usec = std::chrono::microseconds;

inline constexpr unsigned NOF_SFNS                = 1024;
inline constexpr unsigned NOF_SUBFRAMES_PER_FRAME = 10;
inline constexpr unsigned NOF_SYMBOLS_PER_SLOT    = 14;
inline constexpr unsigned NOF_SUBCARRIERS_PER_PRB = 12;

class timing_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerology and sampling parameters for one carrier. Only normal CP and mu in {0, 1} are supported.
struct numerology_config {
    unsigned              mu               = 1;
    unsigned              scs_khz          = 30;
    std::uint64_t         sampling_rate_hz = 23'040'000;
    unsigned              nof_prb          = 51;
    unsigned              fft_size         = 768;
    std::vector<unsigned> symbol_sizes;

    /// Builds a fully populated configuration, deriving fft_size and symbol_sizes. Throws timing_error when the
    /// combination is not representable.
    static numerology_config make(unsigned scs_khz, std::uint64_t sampling_rate_hz, unsigned nof_prb);

    unsigned      slots_per_subframe() const { return 1U << mu; }
    unsigned      symbols_per_subframe() const { return slots_per_subframe() * NOF_SYMBOLS_PER_SLOT; }
    std::uint64_t samples_per_subframe() const { return sampling_rate_hz / 1000; }
    std::uint64_t samples_per_slot() const { return samples_per_subframe() / slots_per_subframe(); }
    unsigned      nof_subcarriers() const { return nof_prb * NOF_SUBCARRIERS_PER_PRB; }
    usec          slot_duration() const { return usec{1000 / slots_per_subframe()}; }

    /// Checks every structural invariant, throwing timing_error naming the first violation.
    void validate() const;
};

/// Per-symbol sample counts (CP + useful part) for one subframe under the normal-CP structure.
std::vector<unsigned> symbol_sizes_for(unsigned mu, std::uint64_t sampling_rate_hz);

struct sample_timestamp {
    std::uint64_t ticks = 0;

    friend bool operator==(sample_timestamp, sample_timestamp) = default;
    friend auto operator<=>(sample_timestamp, sample_timestamp) = default;
};

/// Position in the SFN/subframe/slot lattice. Arithmetic wraps at the 1024-frame hyperframe.
class slot_point
{
public:
    slot_point() = default;
    slot_point(unsigned mu, std::uint32_t system_slot);
    slot_point(unsigned mu, unsigned sfn, unsigned subframe, unsigned slot);

    /// Maps an unbounded signed slot count onto the hyperframe, positive modulo.
    static slot_point from_absolute(unsigned mu, std::int64_t absolute_slot);

    unsigned      numerology() const { return mu_; }
    std::uint32_t system_slot() const { return count_; }
    unsigned      sfn() const { return count_ / (NOF_SUBFRAMES_PER_FRAME * slots_per_subframe()); }
    unsigned      subframe_index() const { return (count_ / slots_per_subframe()) % NOF_SUBFRAMES_PER_FRAME; }
    unsigned      slot_index() const { return count_ % slots_per_subframe(); }
    unsigned      slots_per_subframe() const { return 1U << mu_; }
    std::uint32_t nof_slots_per_system_frame() const { return NOF_SFNS * NOF_SUBFRAMES_PER_FRAME * slots_per_subframe(); }

    slot_point& operator++();
    slot_point& operator--();
    slot_point& operator+=(std::int64_t n);
    slot_point  operator+(std::int64_t n) const
    {
        slot_point r = *this;
        r += n;
        return r;
    }

    friend bool operator==(const slot_point&, const slot_point&) = default;

private:
    unsigned      mu_    = 0;
    std::uint32_t count_ = 0;
};

struct slot_sample_position {
    slot_point slot;
    unsigned   symbol_in_slot   = 0;
    unsigned   sample_in_symbol = 0;
};

struct gps_instant {
    std::int64_t  seconds     = 0;
    std::uint32_t nanoseconds = 0;
};

struct alignment_config {
    std::uint64_t rx_to_tx_max_delay_samples = 1;

    /// Converts a delay in nanoseconds to samples at the given rate, rounding up.
    static alignment_config from_delay(std::chrono::nanoseconds delay, std::uint64_t sampling_rate_hz);
};

/// Default low-PHY transmit lead.
inline constexpr std::chrono::nanoseconds default_rx_to_tx_max_delay{1'000'800};

sample_timestamp     align_start_time(sample_timestamp now, const numerology_config& cfg);
slot_sample_position slot_point_from_sample_time(sample_timestamp t, const numerology_config& cfg);
slot_point           gps_slot_point(gps_instant now, const numerology_config& cfg);

/// Forward distance from src to dst on the hyperframe ring. Throws timing_error on mixed numerologies.
std::uint32_t calculate_slot_diff(const slot_point& src, const slot_point& dst);

std::uint32_t alignment_offset(const slot_point&       phy_slot,
                               const slot_point&       gps_slot,
                               const alignment_config& align,
                               const numerology_config& cfg);

/// Maps absolute slot indices to virtual time and radio sample time. Absolute slot 0 starts at t0 and at
/// sample tick 0.
struct slot_timebase {
    unsigned      mu               = 1;
    usec          t0               = usec{0};
    usec          slot_duration    = usec{500};
    std::uint64_t samples_per_slot = 11520;

    static slot_timebase for_numerology(const numerology_config& cfg, usec t0);

    usec             ota_time(std::int64_t absolute_slot) const { return t0 + slot_duration * absolute_slot; }
    sample_timestamp ota_ticks(std::int64_t absolute_slot) const
    {
        return {static_cast<std::uint64_t>(absolute_slot) * samples_per_slot};
    }
    /// Slot whose OTA interval contains t (floor).
    std::int64_t slot_at(usec t) const;
    slot_point   point(std::int64_t absolute_slot) const { return slot_point::from_absolute(mu, absolute_slot); }

    /// Absolute slot nearest to reference_absolute whose wire fields match (frame_id mod 256, subframe, slot).
    std::int64_t resolve(unsigned frame_id, unsigned subframe, unsigned slot, std::int64_t reference_absolute) const;
};

} // namespace ofhsim
