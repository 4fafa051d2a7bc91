#pragma once

#include "finsight/engine/engine_core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace finsight::engine {

struct RuntimeOptions {
    std::string bob_host = "127.0.0.1";
    std::uint16_t bob_port = 0;
    std::string ui_host = "127.0.0.1";
    std::uint16_t ui_port = 0;  // 0 picks a free port
    /// Called once the UI WebSocket listens, with the bound port.
    std::function<void(std::uint16_t)> on_ui_listening;
    /// Retry the bob connection for this long before giving up.
    double connect_timeout_s = 5.0;
    std::optional<double> max_duration_s;
    bool handle_signals = false;
};

struct RunSummary {
    std::size_t frames = 0;
    std::size_t records = 0;
    std::size_t corrupt_frames = 0;
    std::size_t storage_errors = 0;
    bool device_said_bye = false;
};

/// Connects to the bob over TCP, serves UI clients over WebSocket and runs
/// the engine core on the wall clock until the bob goes away, the time
/// limit passes or a signal arrives. Throws IoError when the bob cannot be
/// reached or the UI port cannot be bound.
RunSummary run_engine(EngineCore& core, const RuntimeOptions& opts);

} // namespace finsight::engine
