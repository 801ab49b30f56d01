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

#include "ofhsim/udp_link.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <functional>
#include <map>
#include <queue>

namespace ofhsim {

namespace {

sockaddr_in to_sockaddr(const udp_endpoint& ep)
{
    sockaddr_in a{};
    a.sin_family = AF_INET;
    a.sin_port   = htons(ep.port);
    if (inet_pton(AF_INET, ep.host.c_str(), &a.sin_addr) != 1) {
        throw udp_error("invalid IPv4 address '" + ep.host + "'");
    }
    return a;
}

[[noreturn]] void fail(const std::string& what)
{
    throw udp_error(what + ": " + std::strerror(errno));
}

constexpr std::size_t MAX_DATAGRAM = 65536;

} // namespace

udp_socket::udp_socket(const udp_endpoint& local)
{
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) {
        fail("socket");
    }
    const sockaddr_in a = to_sockaddr(local);
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&a), sizeof(a)) != 0) {
        const int err = errno;
        ::close(fd_);
        errno = err;
        fail("bind " + local.host + ":" + std::to_string(local.port));
    }
}

udp_socket::~udp_socket()
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

udp_endpoint udp_socket::local() const
{
    sockaddr_in a{};
    socklen_t   len = sizeof(a);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&a), &len) != 0) {
        fail("getsockname");
    }
    char buf[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &a.sin_addr, buf, sizeof(buf));
    return {buf, ntohs(a.sin_port)};
}

void udp_socket::send_to(const udp_endpoint& dst, std::span<const std::uint8_t> bytes)
{
    const sockaddr_in a = to_sockaddr(dst);
    const ssize_t     n =
        ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&a), sizeof(a));
    if (n < 0 || static_cast<std::size_t>(n) != bytes.size()) {
        fail("sendto");
    }
}

std::optional<std::vector<std::uint8_t>> udp_socket::receive(usec timeout)
{
    pollfd p{fd_, POLLIN, 0};
    const int ms = static_cast<int>((timeout.count() + 999) / 1000);
    const int r  = ::poll(&p, 1, ms);
    if (r < 0) {
        if (errno == EINTR) {
            return std::nullopt;
        }
        fail("poll");
    }
    if (r == 0) {
        return std::nullopt;
    }
    std::vector<std::uint8_t> buf(MAX_DATAGRAM);
    const ssize_t             n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n < 0) {
        fail("recv");
    }
    buf.resize(static_cast<std::size_t>(n));
    return buf;
}

live_result run_live(const scenario& sc, const live_options& opt)
{
    sc.validate();
    const slot_timebase tb = sc.timebase();
    du_engine           du(sc.make_du_config());
    ru_engine           ru(sc.make_ru_config());
    ofdm_processor      ue(sc.numerology);
    udp_socket          du_sock(opt.du_bind);
    udp_socket          ru_sock(opt.ru_bind);
    const udp_endpoint  du_ep = du_sock.local();
    const udp_endpoint  ru_ep = ru_sock.local();
    live_result         res;

    using clock      = std::chrono::steady_clock;
    const auto start = clock::now();
    auto       now   = [&] { return std::chrono::duration_cast<usec>(clock::now() - start); };

    struct item {
        usec                  at;
        std::uint64_t         seq;
        std::function<void()> fn;
    };
    auto later = [](const item& a, const item& b) { return a.at != b.at ? a.at > b.at : a.seq > b.seq; };
    std::priority_queue<item, std::vector<item>, decltype(later)> q(later);
    std::uint64_t                                                 seq = 0;
    auto at = [&](usec t, std::function<void()> fn) { q.push(item{t, seq++, std::move(fn)}); };

    const auto                                        n = static_cast<std::int64_t>(opt.n_slots);
    std::map<std::int64_t, std::vector<sample_block>> ul_buffer;

    for (std::int64_t s = 0; s != n; ++s) {
        at(du.schedule_time(s), [&, s] {
            const slot_plan pl = du.plan(s);
            slot_payload    payload;
            resource_grid   grid;
            if (pl.downlink) {
                grid       = du.dl_source_grid(s);
                payload.dl = &grid;
            }
            payload.ul    = pl.grant;
            payload.prach = pl.prach;
            for (auto& e : du.schedule_slot(s, du.schedule_time(s), payload)) {
                auto bytes = std::make_shared<std::vector<std::uint8_t>>(std::move(e.bytes));
                at(e.emit_at, [&, bytes] {
                    du_sock.send_to(ru_ep, *bytes);
                    res.datagrams_sent++;
                });
            }
        });
        at(tb.ota_time(s), [&, s] {
            const slot_plan pl = du.plan(s);
            if (pl.uplink) {
                resource_grid grid(tb.point(s), sc.nof_ports, sc.numerology.nof_prb);
                fill_qpsk(grid, sc.seed, s, 0x554c, pl.grant->ranges);
                ul_buffer[s] = ue.modulate(grid, tb.ota_ticks(s));
            }
        });
    }
    for (std::int64_t s = -static_cast<std::int64_t>(sc.lowphy_lead_slots); s <= n; ++s) {
        at(tb.ota_time(s), [&, s] {
            std::vector<sample_block> ul;
            if (auto it = ul_buffer.find(s - 1); it != ul_buffer.end()) {
                ul = std::move(it->second);
                ul_buffer.erase(it);
            }
            ru.on_slot_boundary(tb.point(s), tb.ota_time(s), ul);
        });
    }

    auto pump = [&](usec until) {
        do {
            for (const pool_frame& f : ru.drain_frame_pool(now())) {
                ru_sock.send_to(du_ep, f.bytes);
                res.datagrams_sent++;
            }
            usec wait = until - now();
            if (const auto due = ru.next_pool_due()) {
                wait = std::min(wait, *due - now());
            }
            wait = std::max(wait, usec{0});
            pollfd fds[2] = {{du_sock.fd(), POLLIN, 0}, {ru_sock.fd(), POLLIN, 0}};
            const int r   = ::poll(fds, 2, static_cast<int>(wait.count() / 1000));
            if (r < 0 && errno != EINTR) {
                fail("poll");
            }
            // drain everything queued on each socket; one read per poll falls behind at slot rates
            if (r > 0 && (fds[1].revents & POLLIN)) {
                while (auto b = ru_sock.receive(usec{0})) {
                    res.datagrams_received++;
                    res.capture.records.push_back({capture_direction::du_to_ru, now(), *b});
                    ru.on_frame(*b, now());
                }
            }
            if (r > 0 && (fds[0].revents & POLLIN)) {
                while (auto b = du_sock.receive(usec{0})) {
                    res.datagrams_received++;
                    res.capture.records.push_back({capture_direction::ru_to_du, now(), *b});
                    du.on_uplink_frame(*b, now());
                }
            }
        } while (now() < until);
    };

    while (!q.empty()) {
        item it = q.top();
        q.pop();
        pump(it.at);
        it.fn();
    }
    pump(now() + sc.du_profile.ta4_max + sc.numerology.slot_duration() * 4);

    res.ru = ru.snapshot_counters();
    res.du = du.snapshot_counters();
    return res;
}

} // namespace ofhsim
