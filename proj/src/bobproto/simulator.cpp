#include "finsight/bobproto/simulator.hpp"

#include "finsight/common/error.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace finsight::bobproto {

void SimulatorConfig::validate() const {
    if (!(fps > 0.0) || !std::isfinite(fps))
        throw InvalidArgument("fps must be positive");
    if (!frame_source)
        throw InvalidArgument("simulator needs a frame source");
    if (!(heartbeat_period_s > 0.0) || !(battery_period_s > 0.0))
        throw InvalidArgument("heartbeat and battery periods must be positive");
    lure_params.validate();
}

nlohmann::json trace_entry_to_json(const TraceEntry& e) {
    nlohmann::ordered_json j;
    j["t_s"] = e.t_s;
    j["dir"] = e.dir == Direction::out ? "out" : "in";
    j["type"] = e.type ? nlohmann::ordered_json(to_string(*e.type)) : nlohmann::ordered_json(nullptr);
    j["seq"] = e.seq;
    if (e.frame_id)
        j["frame_id"] = *e.frame_id;
    j["consumed_mah"] = e.consumed_mah;
    return j;
}

double frame_rate_probe(const SessionTrace& trace, double window_s, std::optional<double> start_s) {
    if (!(window_s > 0.0))
        throw InvalidArgument("probe window must be positive");
    std::vector<double> times;
    for (const auto& e : trace)
        if (e.dir == Direction::out && e.type == MessageType::frame)
            times.push_back(e.t_s);
    if (times.empty())
        throw InvalidArgument("trace holds no frames");
    // Frame times are computed, not accumulated, but still carry rounding;
    // the epsilon keeps a frame sitting exactly on an edge on the right side.
    constexpr double eps = 1e-9;
    const double start = start_s.value_or(times.front());
    const auto n = std::count_if(times.begin(), times.end(), [&](double t) {
        return t >= start - eps && t < start + window_s - eps;
    });
    return static_cast<double>(n) / window_s;
}

BobDevice::BobDevice(SimulatorConfig cfg, BatteryModel battery)
    : cfg_(std::move(cfg)), battery_(battery) {
    cfg_.validate();
    battery_.validate();
}

void BobDevice::connect() {
    if (connected_)
        return;
    connected_ = true;
    send(0.0, MessageType::hello,
         encode_hello({cfg_.device_name, cfg_.fps, battery_.capacity_mah}));
}

std::optional<std::pair<double, BobDevice::Due>> BobDevice::next_due() const {
    if (!connected_ || stopped_)
        return std::nullopt;
    std::optional<std::pair<double, Due>> best;
    auto consider = [&](double t, Due d) {
        if (std::isfinite(t) && (!best || std::pair(t, d) < *best))
            best = std::pair(t, d);
    };
    const double draw = battery_.draw_ma(streaming_, lure_.active);
    consider(clock_s_ + battery_.hours_to_depletion(draw) * 3600.0, Due::depletion);
    if (streaming_)
        consider(stream_start_s_ + static_cast<double>(next_frame_) / cfg_.fps, Due::frame);
    consider(static_cast<double>(heartbeats_ + 1) * cfg_.heartbeat_period_s, Due::heartbeat);
    consider(static_cast<double>(battery_reports_ + 1) * cfg_.battery_period_s, Due::battery);
    return best;
}

std::optional<double> BobDevice::next_event_time() const {
    if (auto d = next_due())
        return d->first;
    return std::nullopt;
}

void BobDevice::drain_to(double t_s) {
    if (t_s <= clock_s_)
        return;
    battery_.drain(battery_.draw_ma(streaming_, lure_.active), (t_s - clock_s_) / 3600.0);
    clock_s_ = t_s;
}

void BobDevice::advance(double t_s) {
    while (auto due = next_due()) {
        const auto [when, what] = *due;
        if (when > t_s)
            break;
        drain_to(when);
        switch (what) {
        case Due::depletion:
            battery_.consumed_mah = battery_.capacity_mah;
            send(when, MessageType::bye, {});
            stop(when);
            return;
        case Due::frame: {
            const auto id = static_cast<std::uint32_t>(next_frame_);
            send(when, MessageType::frame, encode_frame({id, cfg_.frame_source->png(next_frame_)}), id);
            ++next_frame_;
            break;
        }
        case Due::heartbeat:
            send(when, MessageType::heartbeat, {});
            ++heartbeats_;
            break;
        case Due::battery:
            send(when, MessageType::battery, encode_battery({battery_.consumed_mah, battery_.capacity_mah}));
            ++battery_reports_;
            break;
        }
    }
    if (!stopped_)
        drain_to(t_s);
}

void BobDevice::receive(double t_s, std::span<const std::uint8_t> bytes) {
    if (!connected_ || stopped_)
        return;
    advance(t_s);
    if (stopped_)
        return;
    reader_.feed(bytes);
    while (auto ev = reader_.next()) {
        if (std::holds_alternative<Corrupt>(*ev)) {
            trace_.push_back({t_s, Direction::in, std::nullopt, 0, std::nullopt, battery_.consumed_mah});
            nack(t_s, 0, NackReason::corrupt);
            continue;
        }
        const auto& msg = std::get<BobMessage>(*ev);
        trace_.push_back({t_s, Direction::in, msg.type, msg.seq, std::nullopt, battery_.consumed_mah});
        handle(t_s, msg);
        if (stopped_)
            return;
    }
}

void BobDevice::handle(double t_s, const BobMessage& msg) {
    if (last_in_seq_ && msg.seq <= *last_in_seq_) {
        nack(t_s, msg.seq, NackReason::out_of_order);
        return;
    }
    last_in_seq_ = msg.seq;

    auto ack = [&] { send(t_s, MessageType::ack, encode_ack({msg.seq, msg.type})); };
    switch (msg.type) {
    case MessageType::hello:
        if (streaming_) {
            nack(t_s, msg.seq, NackReason::unexpected_type);
            return;
        }
        try {
            decode_hello(msg.payload);
        } catch (const ParseError&) {
            nack(t_s, msg.seq, NackReason::corrupt);
            return;
        }
        streaming_ = true;
        stream_start_s_ = t_s;
        next_frame_ = 0;
        ack();
        return;
    case MessageType::lure_on: {
        if (!streaming_) {
            nack(t_s, msg.seq, NackReason::not_ready);
            return;
        }
        std::optional<double> current;
        try {
            current = decode_lure_on(msg.payload);
        } catch (const ParseError&) {
            nack(t_s, msg.seq, NackReason::corrupt);
            return;
        }
        try {
            lure_ = ems::energize(current.value_or(ems::kDefaultLureCurrentA), cfg_.lure_params);
        } catch (const InvalidArgument&) {
            nack(t_s, msg.seq, NackReason::rejected);
            return;
        }
        ack();
        return;
    }
    case MessageType::lure_off:
        lure_ = {};
        ack();
        return;
    case MessageType::bye:
        stop(t_s);
        return;
    case MessageType::heartbeat:
    case MessageType::ack:
    case MessageType::nack:
        return;
    case MessageType::frame:
    case MessageType::battery:
        nack(t_s, msg.seq, NackReason::unexpected_type);
        return;
    }
}

void BobDevice::nack(double t_s, std::uint32_t seq, NackReason reason) {
    send(t_s, MessageType::nack, encode_nack({seq, reason}));
}

void BobDevice::send(double t_s, MessageType type, Bytes payload, std::optional<std::uint32_t> frame_id) {
    BobMessage msg{type, out_seq_++, std::move(payload)};
    encode_into(msg, outbox_);
    trace_.push_back({t_s, Direction::out, type, msg.seq, frame_id, battery_.consumed_mah});
}

void BobDevice::stop(double) {
    lure_ = {};
    streaming_ = false;
    stopped_ = true;
}

Bytes BobDevice::take_output() {
    Bytes out;
    out.swap(outbox_);
    return out;
}

ScriptedPeer::ScriptedPeer(std::vector<Command> script, bool answer_hello)
    : script_(std::move(script)), answer_hello_(answer_hello) {
    std::stable_sort(script_.begin(), script_.end(),
                     [](const Command& a, const Command& b) { return a.t_s < b.t_s; });
}

Bytes ScriptedPeer::emit(const Command& c) {
    BobMessage msg{c.type, c.seq_override.value_or(seq_), c.payload};
    if (!c.seq_override)
        ++seq_;
    return encode(msg);
}

Bytes ScriptedPeer::on_receive(double, std::span<const std::uint8_t> bytes) {
    Bytes reply;
    reader_.feed(bytes);
    while (auto ev = reader_.next()) {
        if (std::holds_alternative<Corrupt>(*ev)) {
            ++corrupt_;
            continue;
        }
        const auto& msg = std::get<BobMessage>(*ev);
        switch (msg.type) {
        case MessageType::hello:
            hello_ = decode_hello(msg.payload);
            if (answer_hello_) {
                const Bytes b = emit({0.0, MessageType::hello, encode_hello({"scripted-peer", 0, 0}), {}});
                reply.insert(reply.end(), b.begin(), b.end());
            }
            break;
        case MessageType::frame: ++frames_; break;
        case MessageType::heartbeat: ++heartbeats_; break;
        case MessageType::battery: battery_.push_back(decode_battery(msg.payload)); break;
        case MessageType::ack: acks_.push_back(decode_ack(msg.payload)); break;
        case MessageType::nack: nacks_.push_back(decode_nack(msg.payload)); break;
        case MessageType::bye: bye_ = true; break;
        default: break;
        }
    }
    return reply;
}

std::optional<double> ScriptedPeer::next_wakeup() const {
    if (next_cmd_ < script_.size())
        return script_[next_cmd_].t_s;
    return std::nullopt;
}

Bytes ScriptedPeer::on_wakeup(double t_s) {
    Bytes out;
    while (next_cmd_ < script_.size() && script_[next_cmd_].t_s <= t_s) {
        const Bytes b = emit(script_[next_cmd_++]);
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

SimulationResult simulate(const SimulatorConfig& cfg, const BatteryModel& battery, VirtualPeer& peer,
                          double until_s) {
    BobDevice device(cfg, battery);
    // Replies land at the same instant, so keep passing bytes until both sides go quiet.
    auto pump = [&](double t, Bytes out) {
        while (!out.empty()) {
            const Bytes reply = peer.on_receive(t, out);
            if (reply.empty())
                return;
            device.receive(t, reply);
            out = device.take_output();
        }
    };

    device.connect();
    pump(0.0, device.take_output());
    while (!device.stopped()) {
        const auto dev_t = device.next_event_time();
        const auto peer_t = peer.next_wakeup();
        if (!dev_t && !peer_t)
            break;
        const double t = std::min(dev_t.value_or(peer_t.value_or(0.0)), peer_t.value_or(*dev_t));
        if (t > until_s)
            break;
        if (peer_t && *peer_t <= t) {
            const Bytes cmd = peer.on_wakeup(t);
            device.receive(t, cmd);
        } else {
            device.advance(t);
        }
        pump(t, device.take_output());
    }
    if (!device.stopped())
        device.advance(until_s);
    return {device.trace(), device.battery(), device.lure(), device.stopped()};
}

} // namespace finsight::bobproto
