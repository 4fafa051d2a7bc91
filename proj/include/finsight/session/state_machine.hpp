#pragma once

#include "finsight/common/time.hpp"
#include "finsight/regulations/catch_record.hpp"
#include "finsight/regulations/regulations.hpp"
#include "finsight/vision/types.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace finsight::session {

using regulations::CatchRecord;
using regulations::Verdict;
using vision::Detection;
using vision::LengthEstimate;

enum class Phase { idle, fish_present, measured, awaiting_decision, releasing, landing };
enum class TimeoutKind { measure, decision };
enum class OperatorChoice { keep, release };
enum class DeviceSignal { ack, nack, battery, bye };

const char* to_string(Phase p) noexcept;
const char* to_string(TimeoutKind k) noexcept;
const char* to_string(OperatorChoice c) noexcept;
const char* to_string(DeviceSignal s) noexcept;
Phase phase_from_string(std::string_view s);
TimeoutKind timeout_kind_from_string(std::string_view s);
OperatorChoice operator_choice_from_string(std::string_view s);
DeviceSignal device_signal_from_string(std::string_view s);

// ---- events -------------------------------------------------------------

struct FrameIn {
    std::uint32_t frame_id = 0;
    std::vector<Detection> detections;
};

/// Empty estimate: the measurement was attempted and is unavailable.
struct MeasureDone {
    std::uint32_t frame_id = 0;
    std::optional<LengthEstimate> estimate;
};

struct VerdictReady {
    std::uint32_t frame_id = 0;
    Verdict verdict;
};

/// frame_id, when present, names the fish the operator was looking at.
struct OperatorInput {
    OperatorChoice choice = OperatorChoice::release;
    std::optional<std::uint32_t> frame_id;
};

struct DeviceEvent {
    DeviceSignal signal = DeviceSignal::ack;
    std::uint32_t seq = 0;
};

struct TimeoutEvent {
    TimeoutKind kind = TimeoutKind::measure;
    std::uint32_t frame_id = 0;
};

struct SessionEvent {
    Timestamp at;
    std::variant<FrameIn, MeasureDone, VerdictReady, OperatorInput, DeviceEvent, TimeoutEvent> body;
};

// ---- effects ------------------------------------------------------------

struct RequestDepth {
    std::uint32_t frame_id = 0;
    Detection detection;
};
struct SendLureOn {};
struct SendLureOff {};
struct AppendLog {
    CatchRecord record;
};
/// Ask the driver to run the regulation check and feed back a VerdictReady.
struct Evaluate {
    std::uint32_t frame_id = 0;
    regulations::CatchContext context;
};
struct NotifyUi {
    nlohmann::ordered_json payload;
};
/// An event that did not fit the current phase; absorbed without a change.
struct Diagnostic {
    std::string message;
};

using Effect = std::variant<RequestDepth, SendLureOn, SendLureOff, AppendLog, Evaluate, NotifyUi, Diagnostic>;

const char* effect_name(const Effect& e) noexcept;
nlohmann::ordered_json effect_to_json(const Effect& e);

// ---- state --------------------------------------------------------------

struct Fish {
    std::uint32_t frame_id = 0;
    Detection detection;
    bool measured = false;
    std::optional<LengthEstimate> length;
    std::optional<Verdict> verdict;

    bool operator==(const Fish&) const = default;
};

struct Deadline {
    TimeoutKind kind;
    Timestamp at;

    bool operator==(const Deadline&) const = default;
};

struct SessionState {
    Phase phase = Phase::idle;
    std::optional<Fish> current;
    /// Kept fish per folded species name on bag_day.
    std::map<std::string, int> bag_counts;
    std::optional<CalendarDate> bag_day;
    bool lure_on = false;
    std::optional<Deadline> deadline;

    bool operator==(const SessionState&) const = default;
};

/// Empty when the phase/field consistency rules hold, else a description.
std::optional<std::string> invariant_violation(const SessionState& s);

struct SessionConfig {
    bool auto_release = false;
    std::chrono::milliseconds measure_timeout{10'000};
    std::chrono::milliseconds decision_timeout{60'000};
};

struct StepResult {
    SessionState state;
    std::vector<Effect> effects;
};

/// One fish at a time: highest confidence, then largest area, then leftmost,
/// then topmost. Precondition: non-empty.
std::size_t select_primary(const std::vector<Detection>& detections);

/// The transition function. Total and pure: events that do not fit the phase
/// leave the state as is and emit a Diagnostic.
StepResult step(const SessionConfig& cfg, const SessionState& state, const SessionEvent& event);

} // namespace finsight::session
