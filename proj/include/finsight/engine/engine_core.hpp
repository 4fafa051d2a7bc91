#pragma once

#include "finsight/augment/image.hpp"
#include "finsight/bobproto/codec.hpp"
#include "finsight/bobproto/payloads.hpp"
#include "finsight/session/catch_log.hpp"
#include "finsight/session/driver.hpp"
#include "finsight/vision/depth.hpp"
#include "finsight/vision/detector.hpp"
#include "finsight/vision/types.hpp"

#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace finsight::engine {

struct EngineConfig {
    session::SessionConfig session;
    std::shared_ptr<regulations::RegulationSet> regulations;
    std::shared_ptr<vision::Detector> detector;
    std::shared_ptr<vision::DepthProvider> depth;
    vision::CameraIntrinsics camera;
    /// Put the principal point at each frame's centre instead of camera.cx/cy.
    bool center_principal_point = false;
    double lure_current_a = 0.020;
    std::optional<std::filesystem::path> log_path;
    /// Records every external session event for later replay.
    std::optional<std::filesystem::path> trace_path;
    std::string name = "finsight-engine";
    /// Receives diagnostics and storage errors, one line each.
    std::function<void(const std::string&)> on_diagnostic;
};

/// Engine logic without I/O: bytes from the bob and text from UI clients go
/// in, bytes for the bob and UI messages come out. Every call takes the
/// current time so the same core runs on the wall clock or a virtual one.
class EngineCore {
public:
    explicit EngineCore(EngineConfig cfg);

    struct Output {
        bobproto::Bytes to_bob;
        /// Broadcast to every UI client.
        std::vector<std::string> to_ui;
        /// Only for the client whose message is being handled.
        std::vector<std::string> reply;

        void append(Output&& o);
    };

    Output on_bob_bytes(Timestamp now, std::span<const std::uint8_t> bytes);
    /// The bob connection dropped without a BYE.
    Output on_bob_closed(Timestamp now);
    Output on_ui_text(Timestamp now, std::string_view text);
    /// Fires due session deadlines.
    Output on_tick(Timestamp now);

    std::optional<Timestamp> next_deadline() const { return driver_.next_deadline(); }
    /// State message for a newly connected UI client.
    std::string ui_state_message() const;

    const session::SessionDriver& driver() const noexcept { return driver_; }
    /// Every effect executed so far, in order.
    const std::vector<session::Effect>& effects() const noexcept { return effects_; }
    std::size_t frames_seen() const noexcept { return frames_seen_; }
    std::size_t corrupt_frames() const noexcept { return corrupt_; }
    std::size_t storage_errors() const noexcept { return storage_errors_; }
    bool device_gone() const noexcept { return device_gone_; }
    /// The device ended the session with BYE rather than dropping the link.
    bool device_said_bye() const noexcept { return said_bye_; }
    std::optional<bobproto::BatteryReport> battery() const { return battery_; }

private:
    void handle_message(Timestamp now, const bobproto::BobMessage& msg, Output& out);
    void dispatch(const session::SessionEvent& ev, Output& out);
    void execute(Timestamp now, const session::Effect& fx, Output& out);
    void send(bobproto::MessageType type, bobproto::Bytes payload, Output& out);
    void diagnostic(const std::string& msg);
    std::string frame_message(Timestamp now, std::uint32_t id, const bobproto::Bytes& png,
                              const augment::ImageBuffer& img, const std::vector<vision::Detection>& dets);

    EngineConfig cfg_;
    session::SessionDriver driver_;
    std::optional<session::CatchLog> log_;
    std::optional<std::ofstream> trace_;
    std::deque<session::SessionEvent> pending_;
    bobproto::FrameReader reader_;
    std::uint32_t out_seq_ = 0;
    std::vector<session::Effect> effects_;
    std::optional<std::uint32_t> frame_id_;
    std::optional<augment::ImageBuffer> frame_;
    std::deque<Timestamp> arrivals_;
    std::optional<bobproto::BatteryReport> battery_;
    std::size_t frames_seen_ = 0;
    std::size_t corrupt_ = 0;
    std::size_t storage_errors_ = 0;
    bool device_gone_ = false;
    bool said_bye_ = false;
};

} // namespace finsight::engine
