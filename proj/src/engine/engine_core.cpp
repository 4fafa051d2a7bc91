#include "finsight/engine/engine_core.hpp"

#include "finsight/augment/png_io.hpp"
#include "finsight/common/error.hpp"
#include "finsight/session/trace.hpp"
#include "finsight/vision/geometry.hpp"

#include <boost/beast/core/detail/base64.hpp>
#include <nlohmann/json.hpp>

namespace finsight::engine {

using bobproto::MessageType;
using session::Phase;

namespace {

std::string base64(const bobproto::Bytes& bytes) {
    namespace b64 = boost::beast::detail::base64;
    std::string out(b64::encoded_size(bytes.size()), '\0');
    out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
    return out;
}

nlohmann::ordered_json box_json(const vision::Detection& d) {
    nlohmann::ordered_json j;
    j["species"] = d.species;
    j["confidence"] = d.confidence;
    j["x"] = d.box.x;
    j["y"] = d.box.y;
    j["w"] = d.box.w;
    j["h"] = d.box.h;
    return j;
}

nlohmann::ordered_json error_message(const std::string& what) {
    nlohmann::ordered_json j;
    j["type"] = "error";
    j["message"] = what;
    return j;
}

} // namespace

void EngineCore::Output::append(Output&& o) {
    to_bob.insert(to_bob.end(), o.to_bob.begin(), o.to_bob.end());
    for (auto& s : o.to_ui)
        to_ui.push_back(std::move(s));
    for (auto& s : o.reply)
        reply.push_back(std::move(s));
}

EngineCore::EngineCore(EngineConfig cfg)
    : cfg_(std::move(cfg)),
      driver_(cfg_.session, cfg_.regulations ? *cfg_.regulations
                                             : throw InvalidArgument("engine needs a regulation set")) {
    if (!cfg_.detector)
        throw InvalidArgument("engine needs a detector");
    if (!cfg_.depth)
        throw InvalidArgument("engine needs a depth provider");
    if (cfg_.log_path)
        log_.emplace(*cfg_.log_path);
    if (cfg_.trace_path) {
        trace_.emplace(*cfg_.trace_path, std::ios::trunc);
        if (!*trace_)
            throw IoError("cannot write trace " + cfg_.trace_path->string());
        *trace_ << session::trace_header_line(cfg_.session, *cfg_.regulations) << std::endl;
    }
}

void EngineCore::diagnostic(const std::string& msg) {
    if (cfg_.on_diagnostic)
        cfg_.on_diagnostic(msg);
}

void EngineCore::send(MessageType type, bobproto::Bytes payload, Output& out) {
    if (device_gone_)
        return;
    bobproto::encode_into({type, out_seq_++, std::move(payload)}, out.to_bob);
}

std::string EngineCore::ui_state_message() const {
    const auto& s = driver_.state();
    nlohmann::ordered_json j;
    j["type"] = "state";
    j["phase"] = session::to_string(s.phase);
    j["frame_id"] = s.current ? nlohmann::ordered_json(s.current->frame_id) : nlohmann::ordered_json(nullptr);
    j["lure_on"] = s.lure_on;
    j["decision_enabled"] = s.phase == Phase::awaiting_decision;
    // Late-joining clients need the card that is on screen.
    if (s.current && s.current->verdict) {
        nlohmann::ordered_json v;
        v["species"] = s.current->detection.species;
        v["length_cm"] = s.current->length ? nlohmann::ordered_json(s.current->length->length_cm)
                                           : nlohmann::ordered_json(nullptr);
        v["decision"] = regulations::to_string(s.current->verdict->decision);
        auto reasons = nlohmann::ordered_json::array();
        for (auto r : s.current->verdict->reasons)
            reasons.push_back(regulations::to_string(r));
        v["reasons"] = std::move(reasons);
        j["verdict"] = std::move(v);
    } else {
        j["verdict"] = nullptr;
    }
    if (battery_)
        j["battery"] = {{"consumed_mah", battery_->consumed_mah}, {"capacity_mah", battery_->capacity_mah}};
    else
        j["battery"] = nullptr;
    return j.dump();
}

void EngineCore::dispatch(const session::SessionEvent& first, Output& out) {
    pending_.push_back(first);
    while (!pending_.empty()) {
        const session::SessionEvent ev = std::move(pending_.front());
        pending_.pop_front();
        const Phase before = driver_.state().phase;
        if (trace_)
            *trace_ << session::trace_event_line(ev) << std::endl;
        for (const auto& fx : driver_.dispatch(ev))
            execute(ev.at, fx, out);
        if (driver_.state().phase != before)
            out.to_ui.push_back(ui_state_message());
    }
}

void EngineCore::execute(Timestamp now, const session::Effect& fx, Output& out) {
    effects_.push_back(fx);
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, session::RequestDepth>) {
                std::optional<vision::LengthEstimate> est;
                if (frame_ && frame_id_ == e.frame_id) {
                    try {
                        const auto depth = cfg_.depth->depth_for(e.frame_id, *frame_);
                        vision::CameraIntrinsics cam = cfg_.camera;
                        if (cfg_.center_principal_point) {
                            cam.cx = frame_->width() / 2;
                            cam.cy = frame_->height() / 2;
                        }
                        est = vision::estimate_length(e.detection, depth, cam);
                    } catch (const vision::MeasurementUnavailable& m) {
                        diagnostic(std::string("measurement unavailable: ") + m.what());
                    }
                }
                pending_.push_back({now, session::MeasureDone{e.frame_id, est}});
            } else if constexpr (std::is_same_v<T, session::SendLureOn>) {
                send(MessageType::lure_on, bobproto::encode_lure_on(cfg_.lure_current_a), out);
            } else if constexpr (std::is_same_v<T, session::SendLureOff>) {
                send(MessageType::lure_off, {}, out);
            } else if constexpr (std::is_same_v<T, session::AppendLog>) {
                if (log_) {
                    try {
                        log_->append(e.record);
                    } catch (const IoError& err) {
                        ++storage_errors_;
                        diagnostic(err.what());
                        out.to_ui.push_back(error_message(err.what()).dump());
                    }
                }
            } else if constexpr (std::is_same_v<T, session::NotifyUi>) {
                out.to_ui.push_back(e.payload.dump());
            } else if constexpr (std::is_same_v<T, session::Diagnostic>) {
                diagnostic(e.message);
            }
        },
        fx);
}

std::string EngineCore::frame_message(Timestamp now, std::uint32_t id, const bobproto::Bytes& png,
                                      const augment::ImageBuffer& img,
                                      const std::vector<vision::Detection>& dets) {
    arrivals_.push_back(now);
    while (!arrivals_.empty() && arrivals_.front() <= now - std::chrono::seconds(1))
        arrivals_.pop_front();
    nlohmann::ordered_json j;
    j["type"] = "frame";
    j["frame_id"] = id;
    j["width"] = img.width();
    j["height"] = img.height();
    j["image"] = "data:image/png;base64," + base64(png);
    auto boxes = nlohmann::ordered_json::array();
    for (const auto& d : dets)
        boxes.push_back(box_json(d));
    j["boxes"] = std::move(boxes);
    j["fps"] = arrivals_.size();
    return j.dump();
}

void EngineCore::handle_message(Timestamp now, const bobproto::BobMessage& msg, Output& out) {
    switch (msg.type) {
    case MessageType::hello:
        bobproto::decode_hello(msg.payload);
        send(MessageType::hello, bobproto::encode_hello({cfg_.name, 0.0, 0.0}), out);
        return;
    case MessageType::frame: {
        auto fp = bobproto::decode_frame(msg.payload);
        augment::ImageBuffer img = augment::decode_png(fp.png);
        std::vector<vision::Detection> dets;
        try {
            dets = cfg_.detector->detect(fp.frame_id, img);
        } catch (const vision::MissingAnnotation&) {
            // Sidecars only list frames that contain fish.
        }
        ++frames_seen_;
        out.to_ui.push_back(frame_message(now, fp.frame_id, fp.png, img, dets));
        frame_id_ = fp.frame_id;
        frame_ = std::move(img);
        dispatch({now, session::FrameIn{fp.frame_id, std::move(dets)}}, out);
        return;
    }
    case MessageType::ack:
        dispatch({now, session::DeviceEvent{session::DeviceSignal::ack, bobproto::decode_ack(msg.payload).acked_seq}},
                 out);
        return;
    case MessageType::nack: {
        const auto n = bobproto::decode_nack(msg.payload);
        diagnostic("bob refused seq " + std::to_string(n.seq) + ": " + bobproto::to_string(n.reason));
        dispatch({now, session::DeviceEvent{session::DeviceSignal::nack, n.seq}}, out);
        return;
    }
    case MessageType::battery:
        battery_ = bobproto::decode_battery(msg.payload);
        dispatch({now, session::DeviceEvent{session::DeviceSignal::battery, msg.seq}}, out);
        out.to_ui.push_back(ui_state_message());
        return;
    case MessageType::bye:
        dispatch({now, session::DeviceEvent{session::DeviceSignal::bye, msg.seq}}, out);
        device_gone_ = true;
        said_bye_ = true;
        return;
    case MessageType::heartbeat:
        return;
    case MessageType::lure_on:
    case MessageType::lure_off:
        diagnostic(std::string("unexpected ") + bobproto::to_string(msg.type) + " from the bob");
        send(MessageType::nack, bobproto::encode_nack({msg.seq, bobproto::NackReason::unexpected_type}), out);
        return;
    }
}

EngineCore::Output EngineCore::on_bob_bytes(Timestamp now, std::span<const std::uint8_t> bytes) {
    Output out = on_tick(now);
    reader_.feed(bytes);
    while (auto ev = reader_.next()) {
        if (const auto* c = std::get_if<bobproto::Corrupt>(&*ev)) {
            ++corrupt_;
            diagnostic("corrupt frame from the bob: " + c->reason);
            send(MessageType::nack, bobproto::encode_nack({0, bobproto::NackReason::corrupt}), out);
            continue;
        }
        const auto& msg = std::get<bobproto::BobMessage>(*ev);
        try {
            handle_message(now, msg, out);
        } catch (const Error& e) {
            diagnostic(std::string("bad ") + bobproto::to_string(msg.type) + " payload: " + e.what());
            send(MessageType::nack, bobproto::encode_nack({msg.seq, bobproto::NackReason::corrupt}), out);
        }
    }
    return out;
}

EngineCore::Output EngineCore::on_bob_closed(Timestamp now) {
    Output out = on_tick(now);
    if (!device_gone_) {
        dispatch({now, session::DeviceEvent{session::DeviceSignal::bye, 0}}, out);
        device_gone_ = true;
    }
    return out;
}

EngineCore::Output EngineCore::on_ui_text(Timestamp now, std::string_view text) {
    Output out = on_tick(now);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        out.reply.push_back(error_message(std::string("malformed message: ") + e.what()).dump());
        return out;
    }
    if (!j.is_object() || j.value("type", "") != "decision") {
        out.reply.push_back(error_message("expected {\"type\":\"decision\",...}").dump());
        return out;
    }
    const std::string value = j.value("value", "");
    session::OperatorInput in;
    if (value == "keep")
        in.choice = session::OperatorChoice::keep;
    else if (value == "release")
        in.choice = session::OperatorChoice::release;
    else {
        out.reply.push_back(error_message("decision value must be \"keep\" or \"release\"").dump());
        return out;
    }
    if (const auto it = j.find("frame_id"); it != j.end() && it->is_number_unsigned())
        in.frame_id = it->get<std::uint32_t>();
    dispatch({now, in}, out);
    return out;
}

EngineCore::Output EngineCore::on_tick(Timestamp now) {
    Output out;
    const Phase before = driver_.state().phase;
    for (const auto& fx : driver_.advance_to(now))
        execute(now, fx, out);
    if (driver_.state().phase != before)
        out.to_ui.push_back(ui_state_message());
    return out;
}

} // namespace finsight::engine
