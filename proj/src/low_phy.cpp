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

#include "ofhsim/low_phy.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <string>

namespace ofhsim {

resource_grid::resource_grid(slot_point slot, unsigned nof_ports, unsigned nof_prb) :
    slot_(slot),
    nof_ports_(nof_ports),
    nof_prb_(nof_prb),
    data_(static_cast<std::size_t>(nof_ports) * NOF_SYMBOLS_PER_SLOT * nof_prb * NOF_SUBCARRIERS_PER_PRB),
    written_(static_cast<std::size_t>(nof_ports) * NOF_SYMBOLS_PER_SLOT * nof_prb, false)
{
}

std::size_t resource_grid::index(unsigned symbol, unsigned port) const
{
    if (symbol >= NOF_SYMBOLS_PER_SLOT || port >= nof_ports_) {
        throw low_phy_error("resource grid index out of range");
    }
    return static_cast<std::size_t>(port) * NOF_SYMBOLS_PER_SLOT + symbol;
}

cf_t& resource_grid::at(unsigned sym, unsigned subcarrier, unsigned port)
{
    return symbol(sym, port)[subcarrier];
}

const cf_t& resource_grid::at(unsigned sym, unsigned subcarrier, unsigned port) const
{
    return symbol(sym, port)[subcarrier];
}

std::span<cf_t> resource_grid::symbol(unsigned sym, unsigned port)
{
    return std::span<cf_t>(data_).subspan(index(sym, port) * nof_subcarriers(), nof_subcarriers());
}

std::span<const cf_t> resource_grid::symbol(unsigned sym, unsigned port) const
{
    return std::span<const cf_t>(data_).subspan(index(sym, port) * nof_subcarriers(), nof_subcarriers());
}

void resource_grid::write_prbs(unsigned sym, unsigned port, unsigned start_prb, std::span<const cf_t> values)
{
    if (values.size() % NOF_SUBCARRIERS_PER_PRB != 0) {
        throw low_phy_error("PRB write must cover whole PRBs");
    }
    const auto nprb = static_cast<unsigned>(values.size() / NOF_SUBCARRIERS_PER_PRB);
    if (start_prb + nprb > nof_prb_) {
        throw low_phy_error("PRB write exceeds the carrier");
    }
    auto dst = symbol(sym, port).subspan(static_cast<std::size_t>(start_prb) * NOF_SUBCARRIERS_PER_PRB);
    std::copy(values.begin(), values.end(), dst.begin());
    const std::size_t base = index(sym, port) * nof_prb_;
    for (unsigned p = start_prb; p != start_prb + nprb; ++p) {
        written_[base + p] = true;
    }
}

bool resource_grid::prb_written(unsigned sym, unsigned port, unsigned prb) const
{
    return prb < nof_prb_ && written_[index(sym, port) * nof_prb_ + prb];
}

void resource_grid::clear()
{
    std::fill(data_.begin(), data_.end(), cf_t{});
    std::fill(written_.begin(), written_.end(), false);
}

int prach_start_subcarrier(int freq_offset_halfscs)
{
    return freq_offset_halfscs / 2;
}

struct ofdm_processor::impl {
    explicit impl(unsigned n) : size(n)
    {
        buffer = fftw_alloc_complex(n);
        if (buffer == nullptr) {
            throw std::bad_alloc();
        }
        forward  = fftw_plan_dft_1d(static_cast<int>(n), buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_1d(static_cast<int>(n), buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~impl()
    {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(buffer);
    }
    impl(const impl&)            = delete;
    impl& operator=(const impl&) = delete;

    cf_t* data() { return reinterpret_cast<cf_t*>(buffer); }

    unsigned      size;
    fftw_complex* buffer;
    fftw_plan     forward;
    fftw_plan     backward;
};

ofdm_processor::ofdm_processor(const numerology_config& cfg) : cfg_(cfg)
{
    cfg_.validate();
    impl_ = std::make_unique<impl>(cfg_.fft_size);
}

ofdm_processor::~ofdm_processor()                                    = default;
ofdm_processor::ofdm_processor(ofdm_processor&&) noexcept            = default;
ofdm_processor& ofdm_processor::operator=(ofdm_processor&&) noexcept = default;

unsigned ofdm_processor::slot_in_subframe(sample_timestamp start) const
{
    const std::uint64_t in_sf = start.ticks % cfg_.samples_per_subframe();
    if (in_sf % cfg_.samples_per_slot() != 0) {
        throw low_phy_error("sample block does not start on a slot boundary");
    }
    return static_cast<unsigned>(in_sf / cfg_.samples_per_slot());
}

std::size_t ofdm_processor::symbol_offset(unsigned slot_in_sf, unsigned symbol) const
{
    const unsigned first = slot_in_sf * NOF_SYMBOLS_PER_SLOT;
    std::size_t    off   = 0;
    for (unsigned s = first; s != first + symbol; ++s) {
        off += cfg_.symbol_sizes[s];
    }
    return off;
}

unsigned ofdm_processor::cp_length(unsigned slot_in_sf, unsigned symbol) const
{
    return cfg_.symbol_sizes[slot_in_sf * NOF_SYMBOLS_PER_SLOT + symbol] - cfg_.fft_size;
}

unsigned ofdm_processor::fft_bin(unsigned subcarrier) const
{
    const int f = static_cast<int>(subcarrier) - static_cast<int>(cfg_.nof_subcarriers() / 2);
    return static_cast<unsigned>((f + static_cast<int>(cfg_.fft_size)) % static_cast<int>(cfg_.fft_size));
}

std::vector<sample_block> ofdm_processor::modulate(const resource_grid& grid, sample_timestamp start)
{
    if (grid.nof_prb() != cfg_.nof_prb) {
        throw low_phy_error("grid has " + std::to_string(grid.nof_prb()) + " PRBs, carrier has " +
                            std::to_string(cfg_.nof_prb));
    }
    const slot_sample_position pos = slot_point_from_sample_time(start, cfg_);
    if (pos.symbol_in_slot != 0 || pos.sample_in_symbol != 0) {
        throw low_phy_error("modulation start is not a slot boundary");
    }
    if (pos.slot != grid.slot()) {
        throw low_phy_error("modulation start does not match the grid's slot");
    }
    const unsigned slot_sf = pos.slot.slot_index();
    const unsigned n       = cfg_.fft_size;
    const double   scale   = 1.0 / n;

    std::vector<sample_block> out;
    out.reserve(grid.nof_ports());
    for (unsigned port = 0; port != grid.nof_ports(); ++port) {
        sample_block block{start, port, std::vector<cf_t>(cfg_.samples_per_slot())};
        std::size_t  offset = 0;
        for (unsigned sym = 0; sym != NOF_SYMBOLS_PER_SLOT; ++sym) {
            cf_t* buf = impl_->data();
            std::fill(buf, buf + n, cf_t{});
            const auto re = grid.symbol(sym, port);
            for (unsigned k = 0; k != re.size(); ++k) {
                buf[fft_bin(k)] = re[k];
            }
            fftw_execute(impl_->backward);

            const unsigned cp  = cp_length(slot_sf, sym);
            cf_t*          dst = block.samples.data() + offset;
            for (unsigned i = 0; i != cp; ++i) {
                dst[i] = buf[n - cp + i] * scale;
            }
            for (unsigned i = 0; i != n; ++i) {
                dst[cp + i] = buf[i] * scale;
            }
            offset += cp + n;
        }
        out.push_back(std::move(block));
    }
    return out;
}

std::vector<cf_t> ofdm_processor::symbol_spectrum(const sample_block& block, unsigned symbol)
{
    if (block.samples.size() != cfg_.samples_per_slot()) {
        throw low_phy_error("sample block has " + std::to_string(block.samples.size()) + " samples, slot needs " +
                            std::to_string(cfg_.samples_per_slot()));
    }
    if (symbol >= NOF_SYMBOLS_PER_SLOT) {
        throw low_phy_error("symbol index out of range");
    }
    const unsigned slot_sf = slot_in_subframe(block.start);
    const unsigned n       = cfg_.fft_size;
    const cf_t*    src     = block.samples.data() + symbol_offset(slot_sf, symbol) + cp_length(slot_sf, symbol);
    std::copy(src, src + n, impl_->data());
    fftw_execute(impl_->forward);
    return {impl_->data(), impl_->data() + n};
}

resource_grid ofdm_processor::demodulate(const sample_block& block)
{
    const slot_sample_position pos = slot_point_from_sample_time(block.start, cfg_);
    resource_grid              grid(pos.slot, 1, cfg_.nof_prb);
    for (unsigned sym = 0; sym != NOF_SYMBOLS_PER_SLOT; ++sym) {
        const std::vector<cf_t> bins = symbol_spectrum(block, sym);
        auto                    re   = grid.symbol(sym, 0);
        for (unsigned k = 0; k != re.size(); ++k) {
            re[k] = bins[fft_bin(k)];
        }
    }
    return grid;
}

std::vector<std::vector<cf_t>> ofdm_processor::extract_prach(const sample_block& block, const prach_extract_config& px)
{
    const int half  = static_cast<int>(cfg_.nof_subcarriers() / 2);
    const int first = prach_start_subcarrier(px.freq_offset_halfscs);
    const int last  = first + static_cast<int>(px.length_ra) - 1;
    if (px.length_ra == 0 || first < -half || last >= half) {
        throw low_phy_error("PRACH band [" + std::to_string(first) + ", " + std::to_string(last) +
                            "] lies outside the carrier");
    }
    if (px.nof_symbols == 0 || px.start_symbol + px.nof_symbols > NOF_SYMBOLS_PER_SLOT) {
        throw low_phy_error("PRACH occasion symbols exceed the slot");
    }

    const int                      n = static_cast<int>(cfg_.fft_size);
    std::vector<std::vector<cf_t>> out;
    out.reserve(px.nof_symbols);
    for (unsigned s = 0; s != px.nof_symbols; ++s) {
        const std::vector<cf_t> bins = symbol_spectrum(block, px.start_symbol + s);
        std::vector<cf_t>       row(px.length_ra);
        for (unsigned i = 0; i != px.length_ra; ++i) {
            row[i] = bins[static_cast<std::size_t>((first + static_cast<int>(i) + n) % n)];
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<sample_block> modulate(const resource_grid& grid, const numerology_config& cfg, sample_timestamp start)
{
    return ofdm_processor(cfg).modulate(grid, start);
}

resource_grid demodulate(const sample_block& block, const numerology_config& cfg)
{
    return ofdm_processor(cfg).demodulate(block);
}

std::vector<std::vector<cf_t>> extract_prach(const sample_block& block, const numerology_config& cfg,
                                             const prach_extract_config& px)
{
    return ofdm_processor(cfg).extract_prach(block, px);
}

} // namespace ofhsim
