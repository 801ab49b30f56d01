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

#include "ofhsim/capture.hpp"

#include <fstream>
#include <iterator>

namespace ofhsim {

namespace {

constexpr char MAGIC[4] = {'O', 'F', 'H', 'C'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, unsigned n)
{
    for (unsigned i = 0; i != n; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

std::uint64_t get_le(const std::vector<std::uint8_t>& in, std::size_t at, unsigned n)
{
    std::uint64_t v = 0;
    for (unsigned i = 0; i != n; ++i) {
        v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
    }
    return v;
}

} // namespace

std::vector<std::uint8_t> capture_file::serialize() const
{
    std::vector<std::uint8_t> out(std::begin(MAGIC), std::end(MAGIC));
    out.push_back(CAPTURE_VERSION);
    for (const auto& r : records) {
        out.push_back(static_cast<std::uint8_t>(r.direction));
        put_le(out, static_cast<std::uint64_t>(r.time.count()), 8);
        put_le(out, r.bytes.size(), 4);
        out.insert(out.end(), r.bytes.begin(), r.bytes.end());
    }
    return out;
}

capture_file capture_file::parse(const std::vector<std::uint8_t>& bytes)
{
    if (bytes.size() < 5 || !std::equal(std::begin(MAGIC), std::end(MAGIC), bytes.begin())) {
        throw capture_error("not a capture file (bad magic)");
    }
    if (bytes[4] != CAPTURE_VERSION) {
        throw capture_error("unsupported capture version " + std::to_string(bytes[4]));
    }
    capture_file f;
    std::size_t  at = 5;
    while (at != bytes.size()) {
        if (bytes.size() - at < 13) {
            throw capture_error("truncated record header at offset " + std::to_string(at));
        }
        capture_record r;
        if (bytes[at] > 1) {
            throw capture_error("bad record direction at offset " + std::to_string(at));
        }
        r.direction           = static_cast<capture_direction>(bytes[at]);
        r.time                = usec{static_cast<std::int64_t>(get_le(bytes, at + 1, 8))};
        const std::uint64_t n = get_le(bytes, at + 9, 4);
        at += 13;
        if (bytes.size() - at < n) {
            throw capture_error("truncated record body at offset " + std::to_string(at));
        }
        r.bytes.assign(bytes.begin() + static_cast<std::ptrdiff_t>(at),
                       bytes.begin() + static_cast<std::ptrdiff_t>(at + n));
        at += n;
        f.records.push_back(std::move(r));
    }
    return f;
}

void capture_file::save(const std::string& path) const
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw capture_error("cannot open '" + path + "' for writing");
    }
    const auto bytes = serialize();
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) {
        throw capture_error("write to '" + path + "' failed");
    }
}

capture_file capture_file::load(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw capture_error("cannot open '" + path + "'");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return parse(bytes);
}

} // namespace ofhsim
