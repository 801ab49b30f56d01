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

// Open Fronthaul C-plane (section types 1 and 3) and U-plane messages over eCPRI.
//
// Wire layout, all multi-byte fields big-endian:
//
//   eCPRI common header (4 bytes)
//     [7:4] version=1 [3:1] reserved [0] concatenation=0 | msg_type | payload_size (16)
//   eCPRI transport header (4 bytes)
//     pc_id/rtc_id (16, eAxC) | seq_id (8) | [7] e_bit=1 [6:0] sub_seq=0
//
//   C-plane common header (8 bytes)
//     [7] data_direction [6:4] payload_version [3:0] filter_index | frame_id
//     [15:12] subframe_id [11:6] slot_id [5:0] start_symbol_id | number_of_sections | section_type
//     ud_comp_hdr ([7:4] iq_width, 16 encoded as 0, [3:0] comp_meth) | reserved
//   C-plane section, type 1 (8 bytes)
//     [23:12] section_id [11] rb [10] sym_inc [9:0] start_prb | num_prb
//     [15:4] re_mask [3:0] num_symbol | [15] ef [14:0] beam_id
//   C-plane section, type 3 (18 bytes): the type 1 fields, then
//     freq_offset (signed 24) | reserved | time_offset (16) | frame_structure | cp_length (16) | reserved
//
//   U-plane application header (4 bytes): the first 4 bytes of the C-plane common header
//   U-plane data section: section_id/rb/sym_inc/start_prb (24) | num_prb | ud_comp_hdr | reserved | PRB blocks
//
// Bytes after the eCPRI payload are accepted only as zero padding up to a total of MIN_PADDED_FRAME bytes.

#pragma once

#include "ofhsim/iq_compress.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace ofhsim {

inline constexpr std::size_t   ECPRI_HEADER_SIZE     = 8;
inline constexpr std::size_t   CPLANE_COMMON_SIZE    = 8;
inline constexpr std::size_t   CPLANE_SECTION1_SIZE  = 8;
inline constexpr std::size_t   CPLANE_SECTION3_SIZE  = 18;
inline constexpr std::size_t   UPLANE_APP_SIZE       = 4;
inline constexpr std::size_t   UPLANE_SECTION_SIZE   = 6;
inline constexpr std::size_t   MIN_PADDED_FRAME      = 46;
inline constexpr std::uint16_t RE_MASK_ALL           = 0x0fff;
inline constexpr std::uint8_t  ECPRI_VERSION         = 1;
inline constexpr std::uint8_t  OFH_PAYLOAD_VERSION   = 1;

enum class ecpri_msg_type : std::uint8_t { iq_data = 0x00, rt_control = 0x02 };
enum class data_direction : std::uint8_t { uplink = 0, downlink = 1 };
enum class ofh_plane : std::uint8_t { control, user };

namespace filter_index {
inline constexpr std::uint8_t standard = 0;
/// PRACH short preamble formats (A1..C2, including B4).
inline constexpr std::uint8_t prach = 1;
} // namespace filter_index

/// Bit widths of the eAxC sub-fields; they must sum to 16.
struct eaxc_layout {
    unsigned du_port_bits     = 4;
    unsigned band_sector_bits = 4;
    unsigned cc_bits          = 4;
    unsigned ru_port_bits     = 4;

    void validate() const;
};

struct eaxc_id {
    std::uint8_t du_port     = 0;
    std::uint8_t band_sector = 0;
    std::uint8_t cc          = 0;
    std::uint8_t ru_port     = 0;

    std::uint16_t  pack(const eaxc_layout& layout) const;
    static eaxc_id unpack(std::uint16_t raw, const eaxc_layout& layout);

    friend bool operator==(const eaxc_id&, const eaxc_id&) = default;
};

struct app_header {
    data_direction direction       = data_direction::downlink;
    std::uint8_t   payload_version = OFH_PAYLOAD_VERSION;
    std::uint8_t   filter_index    = filter_index::standard;
    std::uint8_t   frame_id        = 0;
    std::uint8_t   subframe_id     = 0;
    std::uint8_t   slot_id         = 0;
    std::uint8_t   start_symbol_id = 0;

    friend bool operator==(const app_header&, const app_header&) = default;
};

struct prach_section_fields {
    std::uint16_t time_offset     = 0;
    std::uint8_t  frame_structure = 0;
    std::uint16_t cp_length       = 0;
    /// Signed 24-bit, in half-subcarrier units.
    std::int32_t freq_offset = 0;

    friend bool operator==(const prach_section_fields&, const prach_section_fields&) = default;
};

struct cplane_section {
    std::uint16_t section_id = 0;
    bool          rb         = false;
    bool          sym_inc    = false;
    std::uint16_t start_prb  = 0;
    /// 0 means every PRB of the carrier from start_prb.
    std::uint16_t num_prb    = 0;
    std::uint16_t re_mask    = RE_MASK_ALL;
    std::uint8_t  num_symbol = 14;
    bool          ef         = false;
    std::uint16_t beam_id    = 0;

    std::optional<prach_section_fields> prach;

    friend bool operator==(const cplane_section&, const cplane_section&) = default;
};

struct cplane_message {
    app_header                  app;
    std::uint8_t                section_type = 1;
    comp_params                 comp;
    std::vector<cplane_section> sections;

    friend bool operator==(const cplane_message&, const cplane_message&) = default;
};

struct uplane_section {
    std::uint16_t               section_id = 0;
    bool                        rb         = false;
    bool                        sym_inc    = false;
    std::uint16_t               start_prb  = 0;
    std::uint16_t               num_prb    = 0;
    comp_params                 comp;
    std::vector<compressed_prb> prbs;

    friend bool operator==(const uplane_section&, const uplane_section&) = default;
};

struct uplane_message {
    app_header                  app;
    std::vector<uplane_section> sections;

    friend bool operator==(const uplane_message&, const uplane_message&) = default;
};

/// Carrier context the codec needs to validate PRB ranges and slot ids.
struct codec_config {
    unsigned    mu      = 1;
    unsigned    nof_prb = 51;
    eaxc_layout layout;
};

/// Number of PRBs a (start_prb, num_prb) pair covers on the carrier.
unsigned effective_num_prb(std::uint16_t start_prb, std::uint16_t num_prb, unsigned carrier_nof_prb);

struct frame_header {
    ecpri_msg_type msg_type     = ecpri_msg_type::rt_control;
    std::uint16_t  payload_size = 0;
    eaxc_id        eaxc;
    std::uint8_t   seq_id = 0;
};

struct decoded_cplane {
    frame_header   header;
    cplane_message msg;
};

struct decoded_uplane {
    frame_header   header;
    uplane_message msg;
};

using decoded_frame = std::variant<decoded_cplane, decoded_uplane>;

class encode_error : public std::invalid_argument
{
public:
    encode_error(std::string field, const std::string& what) :
        std::invalid_argument("field '" + field + "': " + what), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class decode_errc {
    truncated,
    bad_version,
    bad_message_type,
    unsupported_feature,
    unsupported_section_type,
    unsupported_compression,
    invalid_field,
    length_mismatch,
    trailing_bytes,
};

const char* to_string(decode_errc e);

class decode_error : public std::runtime_error
{
public:
    decode_error(decode_errc code, const std::string& what) :
        std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }
    decode_errc code() const { return code_; }

private:
    decode_errc code_;
};

std::vector<std::uint8_t> encode_cplane(const cplane_message& msg, const eaxc_id& eaxc, std::uint8_t seq,
                                        const codec_config& cfg);
std::vector<std::uint8_t> encode_uplane(const uplane_message& msg, const eaxc_id& eaxc, std::uint8_t seq,
                                        const codec_config& cfg);

/// Parses only the 8-byte eCPRI header.
frame_header   decode_header(std::span<const std::uint8_t> bytes, const codec_config& cfg);
decoded_cplane decode_cplane(std::span<const std::uint8_t> bytes, const codec_config& cfg);
decoded_uplane decode_uplane(std::span<const std::uint8_t> bytes, const codec_config& cfg);
decoded_frame  decode_frame(std::span<const std::uint8_t> bytes, const codec_config& cfg);

/// Reads the application header common to both planes without validating the rest of the frame.
app_header peek_app_header(std::span<const std::uint8_t> bytes);

enum class seq_status { in_order, gap, duplicate };

struct seq_result {
    seq_status status  = seq_status::in_order;
    unsigned   missing = 0;

    friend bool operator==(const seq_result&, const seq_result&) = default;
};

/// Per-stream eCPRI seq_id continuity. A stream is (eAxC, direction, plane).
class sequence_tracker
{
public:
    seq_result track(std::uint16_t eaxc, data_direction dir, ofh_plane plane, std::uint8_t seq_id);

private:
    std::map<std::tuple<std::uint16_t, data_direction, ofh_plane>, std::uint8_t> expected_;
};

} // namespace ofhsim
