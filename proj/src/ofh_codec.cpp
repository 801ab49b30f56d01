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

#include "ofhsim/ofh_codec.hpp"

#include "ofhsim/timing.hpp"

namespace ofhsim {

namespace {

class byte_writer
{
public:
    explicit byte_writer(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint32_t v) { out_.push_back(static_cast<std::uint8_t>(v)); }
    void u16(std::uint32_t v)
    {
        u8(v >> 8);
        u8(v);
    }
    void u24(std::uint32_t v)
    {
        u8(v >> 16);
        u8(v >> 8);
        u8(v);
    }

private:
    std::vector<std::uint8_t>& out_;
};

class byte_reader
{
public:
    explicit byte_reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::size_t remaining() const { return in_.size() - pos_; }
    std::size_t position() const { return pos_; }

    void need(std::size_t n, const char* what) const
    {
        if (remaining() < n) {
            throw decode_error(decode_errc::truncated, std::string(what) + " needs " + std::to_string(n) + " bytes, " +
                                                           std::to_string(remaining()) + " left");
        }
    }
    std::uint32_t u8() { return in_[pos_++]; }
    std::uint32_t u16()
    {
        const std::uint32_t hi = u8();
        return (hi << 8) | u8();
    }
    std::uint32_t u24()
    {
        const std::uint32_t hi = u16();
        return (hi << 8) | u8();
    }
    std::span<const std::uint8_t> take(std::size_t n)
    {
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

private:
    std::span<const std::uint8_t> in_;
    std::size_t                   pos_ = 0;
};

void require_fits(const char* field, std::uint64_t value, unsigned bits)
{
    if (value >= (std::uint64_t{1} << bits)) {
        throw encode_error(field, std::to_string(value) + " does not fit in " + std::to_string(bits) + " bits");
    }
}

void require(bool cond, const char* field, const std::string& what)
{
    if (!cond) {
        throw encode_error(field, what);
    }
}

std::uint8_t encode_comp_hdr(const comp_params& comp)
{
    try {
        comp.validate();
    } catch (const std::invalid_argument& e) {
        throw encode_error("ud_comp_hdr", e.what());
    }
    return static_cast<std::uint8_t>(((comp.width & 0x0f) << 4) | static_cast<std::uint8_t>(comp.meth));
}

comp_params decode_comp_hdr(std::uint32_t raw)
{
    const unsigned meth  = raw & 0x0f;
    const unsigned width = (raw >> 4) == 0 ? 16 : (raw >> 4);
    if (meth > 1) {
        throw decode_error(decode_errc::unsupported_compression, "comp_meth " + std::to_string(meth));
    }
    comp_params comp{static_cast<comp_method>(meth), width};
    if (comp.meth == comp_method::none && width != 16) {
        throw decode_error(decode_errc::invalid_field, "uncompressed IQ with iq_width " + std::to_string(width));
    }
    return comp;
}

void check_app_header(const app_header& app, const codec_config& cfg)
{
    require_fits("payload_version", app.payload_version, 3);
    require_fits("filter_index", app.filter_index, 4);
    require(app.subframe_id < NOF_SUBFRAMES_PER_FRAME, "subframe_id", "must be < 10");
    require(app.slot_id < (1U << cfg.mu), "slot_id", "exceeds slots per subframe");
    require(app.start_symbol_id < NOF_SYMBOLS_PER_SLOT, "start_symbol_id", "must be < 14");
}

void write_ecpri(byte_writer& w, ecpri_msg_type type, std::size_t payload_size, const eaxc_id& eaxc, std::uint8_t seq,
                 const codec_config& cfg)
{
    require_fits("payload_size", payload_size, 16);
    w.u8(ECPRI_VERSION << 4);
    w.u8(static_cast<std::uint8_t>(type));
    w.u16(static_cast<std::uint32_t>(payload_size));
    w.u16(eaxc.pack(cfg.layout));
    w.u8(seq);
    w.u8(0x80);
}

void write_app_header(byte_writer& w, const app_header& app)
{
    w.u8((static_cast<std::uint32_t>(app.direction) << 7) | (app.payload_version << 4) | app.filter_index);
    w.u8(app.frame_id);
    w.u16((static_cast<std::uint32_t>(app.subframe_id) << 12) | (static_cast<std::uint32_t>(app.slot_id) << 6) |
          app.start_symbol_id);
}

app_header read_app_header(byte_reader& r, const codec_config& cfg)
{
    r.need(UPLANE_APP_SIZE, "application header");
    app_header app;
    const std::uint32_t b0 = r.u8();
    app.direction          = static_cast<data_direction>(b0 >> 7);
    app.payload_version    = static_cast<std::uint8_t>((b0 >> 4) & 0x07);
    app.filter_index       = static_cast<std::uint8_t>(b0 & 0x0f);
    app.frame_id           = static_cast<std::uint8_t>(r.u8());
    const std::uint32_t t  = r.u16();
    app.subframe_id        = static_cast<std::uint8_t>(t >> 12);
    app.slot_id            = static_cast<std::uint8_t>((t >> 6) & 0x3f);
    app.start_symbol_id    = static_cast<std::uint8_t>(t & 0x3f);

    if (app.payload_version != OFH_PAYLOAD_VERSION) {
        throw decode_error(decode_errc::bad_version, "payload_version " + std::to_string(app.payload_version));
    }
    if (app.subframe_id >= NOF_SUBFRAMES_PER_FRAME) {
        throw decode_error(decode_errc::invalid_field, "subframe_id " + std::to_string(app.subframe_id));
    }
    if (app.slot_id >= (1U << cfg.mu)) {
        throw decode_error(decode_errc::invalid_field, "slot_id " + std::to_string(app.slot_id));
    }
    if (app.start_symbol_id >= NOF_SYMBOLS_PER_SLOT) {
        throw decode_error(decode_errc::invalid_field, "start_symbol_id " + std::to_string(app.start_symbol_id));
    }
    return app;
}

/// Validates the eCPRI header and returns a reader positioned after it, bounded to the declared payload.
std::pair<frame_header, std::span<const std::uint8_t>> read_ecpri(std::span<const std::uint8_t> bytes,
                                                                  const codec_config&           cfg)
{
    byte_reader r(bytes);
    r.need(ECPRI_HEADER_SIZE, "eCPRI header");
    const std::uint32_t b0 = r.u8();
    if ((b0 >> 4) != ECPRI_VERSION) {
        throw decode_error(decode_errc::bad_version, "eCPRI revision " + std::to_string(b0 >> 4));
    }
    if (b0 & 0x01) {
        throw decode_error(decode_errc::unsupported_feature, "eCPRI concatenation");
    }
    frame_header h;
    const std::uint32_t type = r.u8();
    if (type != static_cast<std::uint32_t>(ecpri_msg_type::iq_data) &&
        type != static_cast<std::uint32_t>(ecpri_msg_type::rt_control)) {
        throw decode_error(decode_errc::bad_message_type, "eCPRI message type " + std::to_string(type));
    }
    h.msg_type     = static_cast<ecpri_msg_type>(type);
    h.payload_size = static_cast<std::uint16_t>(r.u16());
    h.eaxc         = eaxc_id::unpack(static_cast<std::uint16_t>(r.u16()), cfg.layout);
    h.seq_id       = static_cast<std::uint8_t>(r.u8());
    const std::uint32_t seq2 = r.u8();
    if ((seq2 & 0x80) == 0 || (seq2 & 0x7f) != 0) {
        throw decode_error(decode_errc::unsupported_feature, "eCPRI fragmentation");
    }
    if (h.payload_size < ECPRI_HEADER_SIZE - 4) {
        throw decode_error(decode_errc::length_mismatch, "payload_size " + std::to_string(h.payload_size));
    }
    const std::size_t end = 4 + static_cast<std::size_t>(h.payload_size);
    if (bytes.size() < end) {
        throw decode_error(decode_errc::truncated, "payload_size " + std::to_string(h.payload_size) + " exceeds buffer of " +
                                                       std::to_string(bytes.size()) + " bytes");
    }
    for (std::size_t i = end; i < bytes.size(); ++i) {
        if (bytes[i] != 0 || bytes.size() > MIN_PADDED_FRAME) {
            throw decode_error(decode_errc::trailing_bytes,
                               std::to_string(bytes.size() - end) + " bytes after the eCPRI payload");
        }
    }
    return {h, bytes.subspan(ECPRI_HEADER_SIZE, end - ECPRI_HEADER_SIZE)};
}

} // namespace

const char* to_string(decode_errc e)
{
    switch (e) {
        case decode_errc::truncated:
            return "truncated";
        case decode_errc::bad_version:
            return "bad version";
        case decode_errc::bad_message_type:
            return "bad message type";
        case decode_errc::unsupported_feature:
            return "unsupported feature";
        case decode_errc::unsupported_section_type:
            return "unsupported section type";
        case decode_errc::unsupported_compression:
            return "unsupported compression";
        case decode_errc::invalid_field:
            return "invalid field";
        case decode_errc::length_mismatch:
            return "length mismatch";
        case decode_errc::trailing_bytes:
            return "trailing bytes";
    }
    return "unknown";
}

void eaxc_layout::validate() const
{
    if (du_port_bits + band_sector_bits + cc_bits + ru_port_bits != 16) {
        throw std::invalid_argument("eAxC field widths must sum to 16");
    }
}

std::uint16_t eaxc_id::pack(const eaxc_layout& layout) const
{
    layout.validate();
    require_fits("eaxc.du_port", du_port, layout.du_port_bits);
    require_fits("eaxc.band_sector", band_sector, layout.band_sector_bits);
    require_fits("eaxc.cc", cc, layout.cc_bits);
    require_fits("eaxc.ru_port", ru_port, layout.ru_port_bits);
    std::uint32_t v = du_port;
    v               = (v << layout.band_sector_bits) | band_sector;
    v               = (v << layout.cc_bits) | cc;
    v               = (v << layout.ru_port_bits) | ru_port;
    return static_cast<std::uint16_t>(v);
}

eaxc_id eaxc_id::unpack(std::uint16_t raw, const eaxc_layout& layout)
{
    layout.validate();
    auto take = [&raw](unsigned bits) {
        const auto v = static_cast<std::uint8_t>(raw & ((1U << bits) - 1));
        raw          = static_cast<std::uint16_t>(bits >= 16 ? 0 : raw >> bits);
        return v;
    };
    eaxc_id id;
    id.ru_port     = take(layout.ru_port_bits);
    id.cc          = take(layout.cc_bits);
    id.band_sector = take(layout.band_sector_bits);
    id.du_port     = take(layout.du_port_bits);
    return id;
}

unsigned effective_num_prb(std::uint16_t start_prb, std::uint16_t num_prb, unsigned carrier_nof_prb)
{
    if (num_prb != 0) {
        return num_prb;
    }
    return start_prb < carrier_nof_prb ? carrier_nof_prb - start_prb : 0;
}

std::vector<std::uint8_t> encode_cplane(const cplane_message& msg, const eaxc_id& eaxc, std::uint8_t seq,
                                        const codec_config& cfg)
{
    check_app_header(msg.app, cfg);
    require(msg.section_type == 1 || msg.section_type == 3, "section_type", "only types 1 and 3 are supported");
    require(!msg.sections.empty(), "sections", "at least one section is required");
    require_fits("number_of_sections", msg.sections.size(), 8);
    const std::uint8_t comp_hdr = encode_comp_hdr(msg.comp);

    const bool        is_prach     = msg.section_type == 3;
    const std::size_t section_size = is_prach ? CPLANE_SECTION3_SIZE : CPLANE_SECTION1_SIZE;
    const std::size_t total = ECPRI_HEADER_SIZE + CPLANE_COMMON_SIZE + section_size * msg.sections.size();

    std::vector<std::uint8_t> out;
    out.reserve(total);
    byte_writer w(out);
    write_ecpri(w, ecpri_msg_type::rt_control, total - 4, eaxc, seq, cfg);
    write_app_header(w, msg.app);
    w.u8(static_cast<std::uint32_t>(msg.sections.size()));
    w.u8(msg.section_type);
    w.u8(comp_hdr);
    w.u8(0);

    for (const cplane_section& s : msg.sections) {
        require_fits("section_id", s.section_id, 12);
        require_fits("start_prb", s.start_prb, 10);
        require_fits("num_prb", s.num_prb, 8);
        require_fits("re_mask", s.re_mask, 12);
        require_fits("beam_id", s.beam_id, 15);
        require(s.num_symbol >= 1 && s.num_symbol <= NOF_SYMBOLS_PER_SLOT, "num_symbol", "must be in [1, 14]");
        require(msg.app.start_symbol_id + s.num_symbol <= NOF_SYMBOLS_PER_SLOT, "num_symbol",
                "start_symbol_id + num_symbol exceeds 14");
        const unsigned eff = effective_num_prb(s.start_prb, s.num_prb, cfg.nof_prb);
        require(eff > 0 && s.start_prb + eff <= cfg.nof_prb, "start_prb", "PRB range exceeds the carrier");
        require(s.prach.has_value() == is_prach, "prach", "type 3 sections and only those carry PRACH fields");

        w.u24((static_cast<std::uint32_t>(s.section_id) << 12) | (static_cast<std::uint32_t>(s.rb) << 11) |
              (static_cast<std::uint32_t>(s.sym_inc) << 10) | s.start_prb);
        w.u8(s.num_prb);
        w.u16((static_cast<std::uint32_t>(s.re_mask) << 4) | s.num_symbol);
        w.u16((static_cast<std::uint32_t>(s.ef) << 15) | s.beam_id);
        if (is_prach) {
            const prach_section_fields& p = *s.prach;
            require(p.freq_offset >= -(1 << 23) && p.freq_offset < (1 << 23), "freq_offset", "exceeds signed 24 bits");
            w.u24(static_cast<std::uint32_t>(p.freq_offset) & 0xffffff);
            w.u8(0);
            w.u16(p.time_offset);
            w.u8(p.frame_structure);
            w.u16(p.cp_length);
            w.u8(0);
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_uplane(const uplane_message& msg, const eaxc_id& eaxc, std::uint8_t seq,
                                        const codec_config& cfg)
{
    check_app_header(msg.app, cfg);
    require(!msg.sections.empty(), "sections", "at least one data section is required");

    std::size_t total = ECPRI_HEADER_SIZE + UPLANE_APP_SIZE;
    for (const uplane_section& s : msg.sections) {
        encode_comp_hdr(s.comp);
        total += UPLANE_SECTION_SIZE + s.prbs.size() * prb_block_size(s.comp);
    }

    std::vector<std::uint8_t> out;
    out.reserve(total);
    byte_writer w(out);
    write_ecpri(w, ecpri_msg_type::iq_data, total - 4, eaxc, seq, cfg);
    write_app_header(w, msg.app);

    for (const uplane_section& s : msg.sections) {
        require_fits("section_id", s.section_id, 12);
        require_fits("start_prb", s.start_prb, 10);
        require_fits("num_prb", s.num_prb, 8);
        const unsigned eff = effective_num_prb(s.start_prb, s.num_prb, cfg.nof_prb);
        require(eff > 0 && s.start_prb + eff <= cfg.nof_prb, "start_prb", "PRB range exceeds the carrier");
        require(s.prbs.size() == eff, "prbs",
                std::to_string(s.prbs.size()) + " PRB blocks for num_prb " + std::to_string(eff));

        w.u24((static_cast<std::uint32_t>(s.section_id) << 12) | (static_cast<std::uint32_t>(s.rb) << 11) |
              (static_cast<std::uint32_t>(s.sym_inc) << 10) | s.start_prb);
        w.u8(s.num_prb);
        w.u8(encode_comp_hdr(s.comp));
        w.u8(0);
        for (const compressed_prb& prb : s.prbs) {
            require(prb.params == s.comp, "prbs", "PRB compression differs from the section header");
            require(prb.exponent < 16, "exponent", "must fit 4 bits");
            pack_prb(prb, out);
        }
    }
    return out;
}

frame_header decode_header(std::span<const std::uint8_t> bytes, const codec_config& cfg)
{
    return read_ecpri(bytes, cfg).first;
}

app_header peek_app_header(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < ECPRI_HEADER_SIZE + UPLANE_APP_SIZE) {
        throw decode_error(decode_errc::truncated, "frame shorter than the application header");
    }
    byte_reader r(bytes.subspan(ECPRI_HEADER_SIZE));
    app_header  app;
    const std::uint32_t b0 = r.u8();
    app.direction          = static_cast<data_direction>(b0 >> 7);
    app.payload_version    = static_cast<std::uint8_t>((b0 >> 4) & 0x07);
    app.filter_index       = static_cast<std::uint8_t>(b0 & 0x0f);
    app.frame_id           = static_cast<std::uint8_t>(r.u8());
    const std::uint32_t t  = r.u16();
    app.subframe_id        = static_cast<std::uint8_t>(t >> 12);
    app.slot_id            = static_cast<std::uint8_t>((t >> 6) & 0x3f);
    app.start_symbol_id    = static_cast<std::uint8_t>(t & 0x3f);
    return app;
}

decoded_cplane decode_cplane(std::span<const std::uint8_t> bytes, const codec_config& cfg)
{
    auto [header, payload] = read_ecpri(bytes, cfg);
    if (header.msg_type != ecpri_msg_type::rt_control) {
        throw decode_error(decode_errc::bad_message_type, "expected real-time control message");
    }
    byte_reader r(payload);
    decoded_cplane out{header, {}};
    cplane_message& msg = out.msg;
    msg.app             = read_app_header(r, cfg);

    r.need(CPLANE_COMMON_SIZE - UPLANE_APP_SIZE, "C-plane common header");
    const std::uint32_t nsections = r.u8();
    msg.section_type              = static_cast<std::uint8_t>(r.u8());
    if (msg.section_type != 1 && msg.section_type != 3) {
        throw decode_error(decode_errc::unsupported_section_type, "section type " + std::to_string(msg.section_type));
    }
    msg.comp = decode_comp_hdr(r.u8());
    r.u8();

    if (nsections == 0) {
        throw decode_error(decode_errc::invalid_field, "number_of_sections is 0");
    }
    const bool        is_prach     = msg.section_type == 3;
    const std::size_t section_size = is_prach ? CPLANE_SECTION3_SIZE : CPLANE_SECTION1_SIZE;
    if (r.remaining() != nsections * section_size) {
        throw decode_error(r.remaining() < nsections * section_size ? decode_errc::truncated : decode_errc::length_mismatch,
                           std::to_string(nsections) + " sections need " + std::to_string(nsections * section_size) +
                               " bytes, payload has " + std::to_string(r.remaining()));
    }

    msg.sections.reserve(nsections);
    for (std::uint32_t i = 0; i != nsections; ++i) {
        cplane_section      s;
        const std::uint32_t a = r.u24();
        s.section_id          = static_cast<std::uint16_t>(a >> 12);
        s.rb                  = (a >> 11) & 1;
        s.sym_inc             = (a >> 10) & 1;
        s.start_prb           = static_cast<std::uint16_t>(a & 0x3ff);
        s.num_prb             = static_cast<std::uint16_t>(r.u8());
        const std::uint32_t b = r.u16();
        s.re_mask             = static_cast<std::uint16_t>(b >> 4);
        s.num_symbol          = static_cast<std::uint8_t>(b & 0x0f);
        const std::uint32_t c = r.u16();
        s.ef                  = (c >> 15) & 1;
        s.beam_id             = static_cast<std::uint16_t>(c & 0x7fff);
        if (s.ef) {
            throw decode_error(decode_errc::unsupported_feature, "section extensions");
        }
        if (s.num_symbol == 0 || msg.app.start_symbol_id + s.num_symbol > NOF_SYMBOLS_PER_SLOT) {
            throw decode_error(decode_errc::invalid_field, "num_symbol " + std::to_string(s.num_symbol));
        }
        const unsigned eff = effective_num_prb(s.start_prb, s.num_prb, cfg.nof_prb);
        if (eff == 0 || s.start_prb + eff > cfg.nof_prb) {
            throw decode_error(decode_errc::invalid_field, "PRB range exceeds the carrier");
        }
        if (is_prach) {
            prach_section_fields p;
            const std::uint32_t  fo = r.u24();
            p.freq_offset           = static_cast<std::int32_t>(fo << 8) >> 8;
            r.u8();
            p.time_offset     = static_cast<std::uint16_t>(r.u16());
            p.frame_structure = static_cast<std::uint8_t>(r.u8());
            p.cp_length       = static_cast<std::uint16_t>(r.u16());
            r.u8();
            s.prach = p;
        }
        msg.sections.push_back(s);
    }
    return out;
}

decoded_uplane decode_uplane(std::span<const std::uint8_t> bytes, const codec_config& cfg)
{
    auto [header, payload] = read_ecpri(bytes, cfg);
    if (header.msg_type != ecpri_msg_type::iq_data) {
        throw decode_error(decode_errc::bad_message_type, "expected IQ data message");
    }
    byte_reader    r(payload);
    decoded_uplane out{header, {}};
    out.msg.app = read_app_header(r, cfg);

    if (r.remaining() == 0) {
        throw decode_error(decode_errc::length_mismatch, "U-plane message without data sections");
    }
    while (r.remaining() > 0) {
        r.need(UPLANE_SECTION_SIZE, "U-plane section header");
        uplane_section      s;
        const std::uint32_t a = r.u24();
        s.section_id          = static_cast<std::uint16_t>(a >> 12);
        s.rb                  = (a >> 11) & 1;
        s.sym_inc             = (a >> 10) & 1;
        s.start_prb           = static_cast<std::uint16_t>(a & 0x3ff);
        s.num_prb             = static_cast<std::uint16_t>(r.u8());
        s.comp                = decode_comp_hdr(r.u8());
        r.u8();

        const unsigned eff = effective_num_prb(s.start_prb, s.num_prb, cfg.nof_prb);
        if (eff == 0 || s.start_prb + eff > cfg.nof_prb) {
            throw decode_error(decode_errc::invalid_field, "PRB range exceeds the carrier");
        }
        const std::size_t block = prb_block_size(s.comp);
        if (r.remaining() < eff * block) {
            throw decode_error(decode_errc::length_mismatch, "section declares " + std::to_string(eff) + " PRBs, payload holds " +
                                                                 std::to_string(r.remaining() / block));
        }
        s.prbs.reserve(eff);
        for (unsigned i = 0; i != eff; ++i) {
            s.prbs.push_back(unpack_prb(r.take(block), s.comp));
        }
        out.msg.sections.push_back(std::move(s));
    }
    return out;
}

decoded_frame decode_frame(std::span<const std::uint8_t> bytes, const codec_config& cfg)
{
    const frame_header h = read_ecpri(bytes, cfg).first;
    if (h.msg_type == ecpri_msg_type::rt_control) {
        return decode_cplane(bytes, cfg);
    }
    return decode_uplane(bytes, cfg);
}

seq_result sequence_tracker::track(std::uint16_t eaxc, data_direction dir, ofh_plane plane, std::uint8_t seq_id)
{
    const auto key = std::make_tuple(eaxc, dir, plane);
    auto       it  = expected_.find(key);
    if (it == expected_.end()) {
        expected_.emplace(key, static_cast<std::uint8_t>(seq_id + 1));
        return {seq_status::in_order, 0};
    }
    const auto ahead = static_cast<std::uint8_t>(seq_id - it->second);
    if (ahead == 0) {
        it->second = static_cast<std::uint8_t>(seq_id + 1);
        return {seq_status::in_order, 0};
    }
    if (ahead < 128) {
        it->second = static_cast<std::uint8_t>(seq_id + 1);
        return {seq_status::gap, ahead};
    }
    return {seq_status::duplicate, 0};
}

} // namespace ofhsim
