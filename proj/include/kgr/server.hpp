// SPDX-License-Identifier: Apache-2.0
//
// Streaming reward server: one RewardResponse line per RewardRequest line,
// order-preserving per connection, stateless across requests. Transports:
// standard streams or TCP. Verdicts are computed by the same verifier as
// in-process verification, so outputs are bit-identical.
#pragma once

#include <atomic>
#include <istream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "kgr/io.hpp"
#include "kgr/verifier.hpp"

namespace kgr {

// Handles one request line; never throws. Malformed input yields an error
// response carrying whatever request id could be recovered.
inline std::string process_reward_line(const std::string& line, double default_ratio = 0.8) {
    std::string id;
    try {
        const json j = json::parse(line);
        if (j.contains("id") && j["id"].is_string()) id = j["id"].get<std::string>();
        io_detail::require_version(j, schema::reward_request, 0);

        TaskInstance x;
        const auto family = family_from_string(j.at("family").get<std::string>());
        if (!family) throw SchemaError("unknown family");
        x.family = *family;
        x.gold_trace = trace_from_json(x.family, j.at("gold_trace"));
        x.gold_answer = j.at("gold_answer").get<std::string>();
        const double ratio = j.value("process_ratio", default_ratio);
        const Verdict v = verify_response(x, j.at("response_text").get<std::string>(), ratio);

        json out{{"v", schema::reward_response},
                 {"id", id},
                 {"A", v.answer_match},
                 {"P", v.process_match},
                 {"reward", v.reward}};
        if (!v.diagnostics.empty()) out["diagnostics"] = v.diagnostics;
        return out.dump();
    } catch (const std::exception& e) {
        return json{{"v", schema::reward_response}, {"id", id}, {"error", e.what()}}.dump();
    }
}

// Line-delimited serving over streams; responses preserve request order.
inline void serve_lines(std::istream& in, std::ostream& out, double default_ratio = 0.8) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out << process_reward_line(line, default_ratio) << '\n';
        out.flush();
    }
}

// TCP transport: one thread per connection, sequential within a connection.
// Runs until `stop` is set (or forever when stop is null).
inline int serve_tcp(int port, double default_ratio = 0.8, std::atomic<bool>* stop = nullptr,
                     std::atomic<int>* bound_port = nullptr) {
    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) return -1;
    const int one = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
        ::listen(listener, 16) < 0) {
        ::close(listener);
        return -1;
    }
    if (bound_port) {
        sockaddr_in actual{};
        socklen_t len = sizeof actual;
        ::getsockname(listener, reinterpret_cast<sockaddr*>(&actual), &len);
        *bound_port = ntohs(actual.sin_port);
    }

    std::vector<std::thread> workers;
    while (!stop || !stop->load()) {
        timeval tv{0, 200000};
        fd_set fds;
        FD_ZERO(&fds);
        FD_SET(listener, &fds);
        if (::select(listener + 1, &fds, nullptr, nullptr, &tv) <= 0) continue;
        const int conn = ::accept(listener, nullptr, nullptr);
        if (conn < 0) continue;
        workers.emplace_back([conn, default_ratio] {
            std::string buffer;
            char chunk[4096];
            for (;;) {
                const ssize_t got = ::read(conn, chunk, sizeof chunk);
                if (got <= 0) break;
                buffer.append(chunk, static_cast<std::size_t>(got));
                std::size_t nl;
                while ((nl = buffer.find('\n')) != std::string::npos) {
                    const std::string line = buffer.substr(0, nl);
                    buffer.erase(0, nl + 1);
                    if (line.empty()) continue;
                    const std::string response = process_reward_line(line, default_ratio) + "\n";
                    std::size_t sent = 0;
                    while (sent < response.size()) {
                        const ssize_t w = ::write(conn, response.data() + sent,
                                                  response.size() - sent);
                        if (w <= 0) break;
                        sent += static_cast<std::size_t>(w);
                    }
                }
            }
            ::close(conn);
        });
    }
    for (auto& w : workers)
        if (w.joinable()) w.join();
    ::close(listener);
    return 0;
}

}  // namespace kgr
