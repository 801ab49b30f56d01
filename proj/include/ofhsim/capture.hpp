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

// Capture file: "OFHC" | version (1 byte) | records.
// Record: direction (1 byte) | receive time in us (int64 LE) | length (uint32 LE) | frame bytes.

#pragma once

#include "ofhsim/timing.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofhsim {

inline constexpr std::uint8_t CAPTURE_VERSION = 1;

enum class capture_direction : std::uint8_t { du_to_ru = 0, ru_to_du = 1 };

struct capture_record {
    capture_direction         direction = capture_direction::du_to_ru;
    /// Receiver-local arrival time.
    usec                      time{0};
    std::vector<std::uint8_t> bytes;

    friend bool operator==(const capture_record&, const capture_record&) = default;
};

class capture_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct capture_file {
    std::vector<capture_record> records;

    std::vector<std::uint8_t> serialize() const;
    static capture_file       parse(const std::vector<std::uint8_t>& bytes);

    void                save(const std::string& path) const;
    static capture_file load(const std::string& path);

    friend bool operator==(const capture_file&, const capture_file&) = default;
};

} // namespace ofhsim
