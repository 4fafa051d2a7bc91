#pragma once

#include "finsight/bobproto/battery.hpp"
#include "finsight/bobproto/codec.hpp"
#include "finsight/bobproto/frame_source.hpp"
#include "finsight/bobproto/payloads.hpp"
#include "finsight/ems/ems.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace finsight::bobproto {

enum class ClockKind { virtual_clock, real_time };

struct SimulatorConfig {
    double fps = 24.0;
    std::shared_ptr<FrameSource> frame_source;
    ClockKind clock = ClockKind::virtual_clock;
    std::string device_name = "bob-sim";
    double heartbeat_period_s = 1.0;
    double battery_period_s = 10.0;
    ems::ElectricalParams lure_params;

    void validate() const;
};

enum class Direction { out, in };

/// One message seen by the device. Times are seconds since the connection
/// opened, on whichever clock the run used.
struct TraceEntry {
    double t_s = 0.0;
    Direction dir = Direction::out;
    std::optional<MessageType> type;  // empty for an undecodable inbound frame
    std::uint32_t seq = 0;
    std::optional<std::uint32_t> frame_id;
    double consumed_mah = 0.0;
};

using SessionTrace = std::vector<TraceEntry>;

nlohmann::json trace_entry_to_json(const TraceEntry& e);

/// Achieved FRAME rate (outbound frames) in [start_s, start_s + window_s).
/// Without a start the window opens at the first frame. Throws
/// InvalidArgument on a non-positive window or a trace without frames.
double frame_rate_probe(const SessionTrace& trace, double window_s,
                        std::optional<double> start_s = std::nullopt);

/// The bob as a clocked state machine. The caller owns time: it delivers
/// inbound bytes with receive() and lets scheduled traffic out with
/// advance(); both append encoded frames to the outbox.
class BobDevice {
public:
    BobDevice(SimulatorConfig cfg, BatteryModel battery);

    /// Opens the connection at t = 0 and queues the device HELLO.
    void connect();

    /// Emits everything scheduled at or before t (frames, heartbeats,
    /// battery reports, BYE on depletion) and drains the battery up to t.
    void advance(double t_s);
    /// Handles bytes from the peer arriving at t (after advancing to t).
    void receive(double t_s, std::span<const std::uint8_t> bytes);

    /// Next scheduled emission, or none once stopped.
    std::optional<double> next_event_time() const;

    Bytes take_output();
    bool stopped() const noexcept { return stopped_; }
    bool streaming() const noexcept { return streaming_; }
    const ems::LureState& lure() const noexcept { return lure_; }
    const BatteryModel& battery() const noexcept { return battery_; }
    const SessionTrace& trace() const noexcept { return trace_; }

private:
    enum class Due { depletion, frame, heartbeat, battery };
    std::optional<std::pair<double, Due>> next_due() const;
    void drain_to(double t_s);
    void send(double t_s, MessageType type, Bytes payload, std::optional<std::uint32_t> frame_id = {});
    void handle(double t_s, const BobMessage& msg);
    void nack(double t_s, std::uint32_t seq, NackReason reason);
    void stop(double t_s);

    SimulatorConfig cfg_;
    BatteryModel battery_;
    ems::LureState lure_;
    FrameReader reader_;
    Bytes outbox_;
    SessionTrace trace_;

    bool connected_ = false;
    bool streaming_ = false;
    bool stopped_ = false;
    double clock_s_ = 0.0;
    double stream_start_s_ = 0.0;
    std::uint64_t next_frame_ = 0;
    std::uint64_t heartbeats_ = 0;
    std::uint64_t battery_reports_ = 0;
    std::uint32_t out_seq_ = 0;
    std::optional<std::uint32_t> last_in_seq_;
};

/// The other end of a virtual-clock connection. Replies are delivered at the
/// same virtual instant.
class VirtualPeer {
public:
    virtual ~VirtualPeer() = default;
    virtual Bytes on_receive(double t_s, std::span<const std::uint8_t> bytes) = 0;
    virtual std::optional<double> next_wakeup() const { return std::nullopt; }
    virtual Bytes on_wakeup(double t_s) {
        (void)t_s;
        return {};
    }
};

/// Minimal engine stand-in: answers HELLO, sends scripted commands at given
/// times and tallies what it receives.
class ScriptedPeer final : public VirtualPeer {
public:
    struct Command {
        double t_s;
        MessageType type;
        Bytes payload;
        std::optional<std::uint32_t> seq_override;  // for out-of-order tests
    };

    explicit ScriptedPeer(std::vector<Command> script = {}, bool answer_hello = true);

    Bytes on_receive(double t_s, std::span<const std::uint8_t> bytes) override;
    std::optional<double> next_wakeup() const override;
    Bytes on_wakeup(double t_s) override;

    std::size_t frames() const noexcept { return frames_; }
    std::size_t heartbeats() const noexcept { return heartbeats_; }
    std::size_t corrupt() const noexcept { return corrupt_; }
    const std::vector<BatteryReport>& battery_reports() const noexcept { return battery_; }
    const std::vector<AckPayload>& acks() const noexcept { return acks_; }
    const std::vector<NackPayload>& nacks() const noexcept { return nacks_; }
    bool saw_bye() const noexcept { return bye_; }
    std::optional<HelloInfo> device_hello() const { return hello_; }

private:
    Bytes emit(const Command& c);

    std::vector<Command> script_;
    std::size_t next_cmd_ = 0;
    bool answer_hello_;
    std::uint32_t seq_ = 0;
    FrameReader reader_;
    std::size_t frames_ = 0;
    std::size_t heartbeats_ = 0;
    std::size_t corrupt_ = 0;
    std::vector<BatteryReport> battery_;
    std::vector<AckPayload> acks_;
    std::vector<NackPayload> nacks_;
    bool bye_ = false;
    std::optional<HelloInfo> hello_;
};

struct SimulationResult {
    SessionTrace trace;
    BatteryModel battery;
    ems::LureState lure;
    bool stopped = false;
};

/// Runs device and peer on the virtual clock from connection until `until_s`
/// or until the device stops.
SimulationResult simulate(const SimulatorConfig& cfg, const BatteryModel& battery, VirtualPeer& peer,
                          double until_s);

} // namespace finsight::bobproto
