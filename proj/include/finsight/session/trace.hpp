#pragma once

#include "finsight/regulations/regulations.hpp"
#include "finsight/session/driver.hpp"
#include "finsight/session/state_machine.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace finsight::session {

// Session trace: JSON lines. The first line is a header carrying the session
// config and the regulation set; every further line is one external event
// (FRAME_IN, MEASURE_DONE, OPERATOR, DEVICE, or an explicit TIMEOUT).
// Verdicts are not recorded: replay recomputes them from the header's rules,
// and deadlines are re-derived from the event timestamps.

struct Trace {
    SessionConfig config;
    std::optional<regulations::RegulationSet> regulations;
    std::vector<SessionEvent> events;
};

nlohmann::ordered_json event_to_json(const SessionEvent& ev);
/// Throws SchemaError for unknown or malformed events, including VERDICT.
SessionEvent event_from_json(const nlohmann::json& j);

std::string trace_header_line(const SessionConfig& cfg, const regulations::RegulationSet& regs);
std::string trace_event_line(const SessionEvent& ev);

/// An empty document is an empty trace. Throws ParseError / SchemaError
/// with the offending line number.
Trace parse_trace(std::istream& in);
Trace load_trace(const std::filesystem::path& path);
void write_trace(std::ostream& out, const Trace& trace);

struct ReplayResult {
    std::vector<CatchRecord> log;
    std::vector<Effect> effects;
    SessionState final_state;
};

/// Feeds every event through a fresh driver, then lets pending deadlines
/// fire (the recording ended with the fish unresolved).
ReplayResult replay(const Trace& trace);

} // namespace finsight::session
