#pragma once

#include "finsight/bobproto/simulator.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace finsight::bobproto {

struct ServeOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;  // 0 picks a free port
    /// Stop after this much wall time even if the battery lasts.
    std::optional<double> max_duration_s;
    /// Called once the socket listens, with the bound port.
    std::function<void(std::uint16_t)> on_listening;
    /// Stop cleanly on SIGINT/SIGTERM.
    bool handle_signals = false;
};

/// Real-time bob over TCP: accepts one connection, runs the device on the
/// wall clock and returns its trace when the device stops, the peer hangs
/// up or the time limit passes.
SimulationResult serve_tcp(const SimulatorConfig& cfg, const BatteryModel& battery, const ServeOptions& opts);

/// "host:port" with a numeric port. Throws InvalidArgument otherwise.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text);

} // namespace finsight::bobproto
