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

#include "ofhsim/timing.hpp"

#include <numeric>
#include <string>

namespace ofhsim {

namespace {

std::uint64_t divide_ceil(std::uint64_t num, std::uint64_t den)
{
    return (num + den - 1) / den;
}

std::int64_t positive_mod(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace

std::vector<unsigned> symbol_sizes_for(unsigned mu, std::uint64_t sampling_rate_hz)
{
    if (mu > 1) {
        throw timing_error("numerology mu=" + std::to_string(mu) + " not supported");
    }
    const std::uint64_t scs_hz = 15'000ULL << mu;
    if (sampling_rate_hz == 0 || sampling_rate_hz % scs_hz != 0) {
        throw timing_error("sampling rate " + std::to_string(sampling_rate_hz) + " is not a multiple of the SCS");
    }
    const std::uint64_t fft = sampling_rate_hz / scs_hz;

    // Normal CP is 144 kappa 2^-mu Tc; the first symbol of every half subframe gets an extra 16 kappa Tc.
    // Expressed in samples at fft_size: 144 * N / 2048 and 16 * N * 2^mu / 2048.
    if ((144 * fft) % 2048 != 0 || ((16 * fft) << mu) % 2048 != 0) {
        throw timing_error("sampling rate " + std::to_string(sampling_rate_hz) + " gives fractional CP lengths");
    }
    const auto cp_normal = static_cast<unsigned>(144 * fft / 2048);
    const auto cp_extra  = static_cast<unsigned>((16 * fft << mu) / 2048);

    const unsigned        nof_symbols = NOF_SYMBOLS_PER_SLOT << mu;
    std::vector<unsigned> sizes(nof_symbols, static_cast<unsigned>(fft) + cp_normal);
    sizes[0] += cp_extra;
    sizes[nof_symbols / 2] += cp_extra;
    return sizes;
}

numerology_config numerology_config::make(unsigned scs_khz, std::uint64_t sampling_rate_hz, unsigned nof_prb)
{
    numerology_config cfg;
    if (scs_khz == 15) {
        cfg.mu = 0;
    } else if (scs_khz == 30) {
        cfg.mu = 1;
    } else {
        throw timing_error("unsupported subcarrier spacing " + std::to_string(scs_khz) + " kHz");
    }
    cfg.scs_khz          = scs_khz;
    cfg.sampling_rate_hz = sampling_rate_hz;
    cfg.nof_prb          = nof_prb;
    cfg.symbol_sizes     = symbol_sizes_for(cfg.mu, sampling_rate_hz);
    cfg.fft_size         = static_cast<unsigned>(sampling_rate_hz / (scs_khz * 1000ULL));
    cfg.validate();
    return cfg;
}

void numerology_config::validate() const
{
    if (mu > 1 || scs_khz != (15U << mu)) {
        throw timing_error("scs_khz must equal 15 * 2^mu with mu in {0, 1}");
    }
    if (sampling_rate_hz == 0 || sampling_rate_hz % 1000 != 0) {
        throw timing_error("sampling_rate_hz must be a positive multiple of 1000");
    }
    if (static_cast<std::uint64_t>(fft_size) * scs_khz * 1000 != sampling_rate_hz) {
        throw timing_error("fft_size * scs does not equal the sampling rate");
    }
    if (nof_prb == 0 || nof_subcarriers() > fft_size) {
        throw timing_error("nof_prb does not fit in the FFT bandwidth");
    }
    if (symbol_sizes.size() != symbols_per_subframe()) {
        throw timing_error("symbol_sizes has the wrong number of entries");
    }
    if (std::accumulate(symbol_sizes.begin(), symbol_sizes.end(), std::uint64_t{0}) != samples_per_subframe()) {
        throw timing_error("symbol_sizes does not sum to samples_per_subframe");
    }
}

slot_point::slot_point(unsigned mu, std::uint32_t system_slot) : mu_(mu), count_(system_slot)
{
    if (mu > 1) {
        throw timing_error("numerology mu=" + std::to_string(mu) + " not supported");
    }
    if (count_ >= nof_slots_per_system_frame()) {
        throw timing_error("system slot out of range");
    }
}

slot_point::slot_point(unsigned mu, unsigned sfn, unsigned subframe, unsigned slot) : mu_(mu)
{
    if (mu > 1) {
        throw timing_error("numerology mu=" + std::to_string(mu) + " not supported");
    }
    if (sfn >= NOF_SFNS || subframe >= NOF_SUBFRAMES_PER_FRAME || slot >= slots_per_subframe()) {
        throw timing_error("slot point field out of range");
    }
    count_ = (sfn * NOF_SUBFRAMES_PER_FRAME + subframe) * slots_per_subframe() + slot;
}

slot_point slot_point::from_absolute(unsigned mu, std::int64_t absolute_slot)
{
    const std::int64_t period = static_cast<std::int64_t>(NOF_SFNS) * NOF_SUBFRAMES_PER_FRAME << mu;
    return {mu, static_cast<std::uint32_t>(positive_mod(absolute_slot, period))};
}

slot_point& slot_point::operator++()
{
    count_ = (count_ + 1) % nof_slots_per_system_frame();
    return *this;
}

slot_point& slot_point::operator--()
{
    count_ = (count_ + nof_slots_per_system_frame() - 1) % nof_slots_per_system_frame();
    return *this;
}

slot_point& slot_point::operator+=(std::int64_t n)
{
    count_ = static_cast<std::uint32_t>(positive_mod(static_cast<std::int64_t>(count_) + n, nof_slots_per_system_frame()));
    return *this;
}

alignment_config alignment_config::from_delay(std::chrono::nanoseconds delay, std::uint64_t sampling_rate_hz)
{
    const auto ns = static_cast<std::uint64_t>(delay.count());
    return {divide_ceil(ns * sampling_rate_hz, 1'000'000'000ULL)};
}

sample_timestamp align_start_time(sample_timestamp now, const numerology_config& cfg)
{
    const std::uint64_t sf = cfg.samples_per_subframe();
    return {divide_ceil(now.ticks, sf) * sf};
}

slot_sample_position slot_point_from_sample_time(sample_timestamp t, const numerology_config& cfg)
{
    const std::uint64_t sf_samples = cfg.samples_per_subframe();
    const auto          i_sf = static_cast<unsigned>((t.ticks / sf_samples) % (NOF_SFNS * NOF_SUBFRAMES_PER_FRAME));
    auto                i_sample_symbol = static_cast<unsigned>(t.ticks % sf_samples);

    unsigned i_symbol_sf = 0;
    while (i_sample_symbol >= cfg.symbol_sizes[i_symbol_sf]) {
        i_sample_symbol -= cfg.symbol_sizes[i_symbol_sf];
        ++i_symbol_sf;
    }

    const unsigned i_slot = i_sf * cfg.slots_per_subframe() + i_symbol_sf / NOF_SYMBOLS_PER_SLOT;
    slot_point     sp{cfg.mu, 0};
    sp += i_slot;
    return {sp, i_symbol_sf % NOF_SYMBOLS_PER_SLOT, i_sample_symbol};
}

slot_point gps_slot_point(gps_instant now, const numerology_config& cfg)
{
    if (now.nanoseconds >= 1'000'000'000U) {
        throw timing_error("gps_instant nanoseconds out of range");
    }
    constexpr std::int64_t hyperframe_ms = NOF_SFNS * NOF_SUBFRAMES_PER_FRAME;

    const std::int64_t ms_in_second = now.nanoseconds / 1'000'000;
    const std::int64_t subframe_abs = positive_mod(positive_mod(now.seconds, hyperframe_ms) * 1000 + ms_in_second, hyperframe_ms);
    const std::uint32_t us_in_subframe = (now.nanoseconds / 1000) % 1000;
    const std::uint32_t slot_us        = 1000 / cfg.slots_per_subframe();

    const auto sfn      = static_cast<unsigned>(subframe_abs / NOF_SUBFRAMES_PER_FRAME);
    const auto subframe = static_cast<unsigned>(subframe_abs % NOF_SUBFRAMES_PER_FRAME);
    return {cfg.mu, sfn, subframe, us_in_subframe / slot_us};
}

std::uint32_t calculate_slot_diff(const slot_point& src, const slot_point& dst)
{
    if (src.numerology() != dst.numerology()) {
        throw timing_error("calculate_slot_diff across different numerologies");
    }
    const std::int64_t diff = static_cast<std::int64_t>(dst.system_slot()) - src.system_slot();
    return static_cast<std::uint32_t>(diff >= 0 ? diff : diff + dst.nof_slots_per_system_frame());
}

std::uint32_t alignment_offset(const slot_point&        phy_slot,
                               const slot_point&        gps_slot,
                               const alignment_config&  align,
                               const numerology_config& cfg)
{
    if (align.rx_to_tx_max_delay_samples == 0) {
        throw timing_error("rx_to_tx_max_delay must be positive");
    }
    const std::uint32_t diff = calculate_slot_diff(phy_slot, gps_slot);
    return diff + static_cast<std::uint32_t>(divide_ceil(align.rx_to_tx_max_delay_samples, cfg.samples_per_slot()));
}

slot_timebase slot_timebase::for_numerology(const numerology_config& cfg, usec t0)
{
    return {cfg.mu, t0, cfg.slot_duration(), cfg.samples_per_slot()};
}

std::int64_t slot_timebase::slot_at(usec t) const
{
    const std::int64_t rel = (t - t0).count();
    const std::int64_t d   = slot_duration.count();
    return rel >= 0 ? rel / d : -((-rel + d - 1) / d);
}

std::int64_t slot_timebase::resolve(unsigned frame_id, unsigned subframe, unsigned slot, std::int64_t reference_absolute) const
{
    const std::int64_t slots_per_frame  = static_cast<std::int64_t>(NOF_SUBFRAMES_PER_FRAME) << mu;
    const std::int64_t span             = 256 * slots_per_frame;
    const std::int64_t offset_in_span   = (static_cast<std::int64_t>(frame_id % 256) * NOF_SUBFRAMES_PER_FRAME + subframe) *
                                            (std::int64_t{1} << mu) + slot;
    const std::int64_t reference_offset = positive_mod(reference_absolute, span);
    std::int64_t       delta            = offset_in_span - reference_offset;
    if (delta > span / 2) {
        delta -= span;
    } else if (delta < -span / 2) {
        delta += span;
    }
    return reference_absolute + delta;
}

} // namespace ofhsim
