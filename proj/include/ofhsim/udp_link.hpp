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

// Real-socket mode: one OFH frame per UDP datagram, paced by the host monotonic clock.
// Results depend on host scheduling and are not reproducible.

#pragma once

#include "ofhsim/capture.hpp"
#include "ofhsim/scenario.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofhsim {

class udp_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct udp_endpoint {
    std::string   host = "127.0.0.1";
    std::uint16_t port = 0;
};

class udp_socket
{
public:
    /// Binds to `local`; port 0 picks an ephemeral port.
    explicit udp_socket(const udp_endpoint& local);
    ~udp_socket();
    udp_socket(const udp_socket&)            = delete;
    udp_socket& operator=(const udp_socket&) = delete;

    udp_endpoint local() const;
    void         send_to(const udp_endpoint& dst, std::span<const std::uint8_t> bytes);
    /// Non-blocking when timeout is zero.
    std::optional<std::vector<std::uint8_t>> receive(usec timeout);
    int fd() const { return fd_; }

private:
    int fd_ = -1;
};

struct live_options {
    udp_endpoint du_bind;
    udp_endpoint ru_bind;
    unsigned     n_slots = 20;
};

struct live_result {
    ru_counters   ru;
    du_counters   du;
    capture_file  capture;
    std::uint64_t datagrams_sent     = 0;
    std::uint64_t datagrams_received = 0;
};

live_result run_live(const scenario& sc, const live_options& opt);

} // namespace ofhsim
