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

#include "ofhsim/timing.hpp"

#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace ofhsim {

using cf_t = std::complex<double>;

class low_phy_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Frequency-domain samples of one slot: symbol x subcarrier x port. Unwritten entries read as zero.
class resource_grid
{
public:
    resource_grid() = default;
    resource_grid(slot_point slot, unsigned nof_ports, unsigned nof_prb);

    slot_point slot() const { return slot_; }
    void       set_slot(slot_point s) { slot_ = s; }
    unsigned   nof_ports() const { return nof_ports_; }
    unsigned   nof_prb() const { return nof_prb_; }
    unsigned   nof_subcarriers() const { return nof_prb_ * NOF_SUBCARRIERS_PER_PRB; }

    cf_t&       at(unsigned sym, unsigned subcarrier, unsigned port);
    const cf_t& at(unsigned sym, unsigned subcarrier, unsigned port) const;

    std::span<cf_t>       symbol(unsigned sym, unsigned port);
    std::span<const cf_t> symbol(unsigned sym, unsigned port) const;

    /// Writes consecutive PRBs starting at start_prb and marks them as written.
    void write_prbs(unsigned sym, unsigned port, unsigned start_prb, std::span<const cf_t> values);
    bool prb_written(unsigned sym, unsigned port, unsigned prb) const;

    /// Zeroes every sample and clears the occupancy mask.
    void clear();

private:
    std::size_t index(unsigned sym, unsigned port) const;

    slot_point        slot_;
    unsigned          nof_ports_ = 0;
    unsigned          nof_prb_   = 0;
    std::vector<cf_t> data_;
    std::vector<bool> written_;
};

struct sample_block {
    sample_timestamp  start;
    unsigned          port = 0;
    std::vector<cf_t> samples;
};

struct prach_extract_config {
    /// Offset of the first PRACH bin from DC, in half-subcarrier units.
    int      freq_offset_halfscs = 0;
    unsigned length_ra           = 139;
    unsigned start_symbol        = 0;
    unsigned nof_symbols         = 12;
};

/// FFT bin (relative to DC, in subcarriers) of the first PRACH bin. Half-subcarrier offsets round toward zero.
int prach_start_subcarrier(int freq_offset_halfscs);

/// OFDM modulator/demodulator for one numerology. Owns its DFT plans; not shareable across threads.
class ofdm_processor
{
public:
    explicit ofdm_processor(const numerology_config& cfg);
    ~ofdm_processor();
    ofdm_processor(ofdm_processor&&) noexcept;
    ofdm_processor& operator=(ofdm_processor&&) noexcept;

    const numerology_config& config() const { return cfg_; }

    /// One block per port, samples_per_slot long, starting at `start` which must be the grid slot's boundary.
    std::vector<sample_block> modulate(const resource_grid& grid, sample_timestamp start);

    /// Single-port grid for the slot starting at block.start.
    resource_grid demodulate(const sample_block& block);

    /// Full FFT output (fft_size bins, natural order) of one symbol of a slot-aligned block.
    std::vector<cf_t> symbol_spectrum(const sample_block& block, unsigned symbol);

    /// PRACH bins as [symbol][bin].
    std::vector<std::vector<cf_t>> extract_prach(const sample_block& block, const prach_extract_config& px);

private:
    struct impl;

    unsigned slot_in_subframe(sample_timestamp start) const;
    std::size_t symbol_offset(unsigned slot_in_sf, unsigned symbol) const;
    unsigned    cp_length(unsigned slot_in_sf, unsigned symbol) const;
    unsigned    fft_bin(unsigned subcarrier) const;

    numerology_config     cfg_;
    std::unique_ptr<impl> impl_;
};

std::vector<sample_block> modulate(const resource_grid& grid, const numerology_config& cfg, sample_timestamp start);
resource_grid             demodulate(const sample_block& block, const numerology_config& cfg);
std::vector<std::vector<cf_t>> extract_prach(const sample_block& block, const numerology_config& cfg,
                                             const prach_extract_config& px);

} // namespace ofhsim
