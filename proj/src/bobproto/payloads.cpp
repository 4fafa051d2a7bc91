#include "finsight/bobproto/payloads.hpp"

#include "finsight/common/error.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace finsight::bobproto {

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> p, std::size_t at) {
    return (std::uint32_t{p[at]} << 24) | (std::uint32_t{p[at + 1]} << 16) |
           (std::uint32_t{p[at + 2]} << 8) | std::uint32_t{p[at + 3]};
}

void require_size(std::span<const std::uint8_t> p, std::size_t n, const char* what) {
    if (p.size() != n)
        throw ParseError(std::string(what) + " payload must be " + std::to_string(n) +
                             " bytes, got " + std::to_string(p.size()),
                         std::min(p.size(), n));
}

std::uint32_t to_fixed(double value, double scale, const char* what) {
    const double scaled = std::round(value * scale);
    if (!(scaled >= 0.0) || scaled > std::numeric_limits<std::uint32_t>::max())
        throw InvalidArgument(std::string(what) + " out of range for a u32 field");
    return static_cast<std::uint32_t>(scaled);
}

} // namespace

Bytes encode_hello(const HelloInfo& info) {
    nlohmann::ordered_json j;
    j["device"] = info.device;
    j["fps"] = info.fps;
    j["capacity_mah"] = info.capacity_mah;
    const std::string text = j.dump();
    return Bytes(text.begin(), text.end());
}

HelloInfo decode_hello(std::span<const std::uint8_t> payload) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(payload.begin(), payload.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("HELLO payload: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
    if (!j.is_object() || !j.contains("device") || !j["device"].is_string())
        throw ParseError("HELLO payload needs a string \"device\"", 0);
    HelloInfo info;
    info.device = j["device"].get<std::string>();
    if (auto it = j.find("fps"); it != j.end() && it->is_number())
        info.fps = it->get<double>();
    if (auto it = j.find("capacity_mah"); it != j.end() && it->is_number())
        info.capacity_mah = it->get<double>();
    return info;
}

Bytes encode_frame(const FramePayload& frame) {
    Bytes out;
    out.reserve(4 + frame.png.size());
    put_u32(out, frame.frame_id);
    out.insert(out.end(), frame.png.begin(), frame.png.end());
    return out;
}

FramePayload decode_frame(std::span<const std::uint8_t> payload) {
    if (payload.size() < 4)
        throw ParseError("FRAME payload shorter than its frame id", payload.size());
    return FramePayload{get_u32(payload, 0), Bytes(payload.begin() + 4, payload.end())};
}

Bytes encode_battery(const BatteryReport& report) {
    Bytes out;
    put_u32(out, to_fixed(report.consumed_mah, 10.0, "consumed_mah"));
    put_u32(out, to_fixed(report.capacity_mah, 10.0, "capacity_mah"));
    return out;
}

BatteryReport decode_battery(std::span<const std::uint8_t> payload) {
    require_size(payload, 8, "BATTERY");
    return BatteryReport{get_u32(payload, 0) / 10.0, get_u32(payload, 4) / 10.0};
}

Bytes encode_ack(const AckPayload& ack) {
    Bytes out;
    put_u32(out, ack.acked_seq);
    out.push_back(static_cast<std::uint8_t>(ack.acked_type));
    return out;
}

AckPayload decode_ack(std::span<const std::uint8_t> payload) {
    require_size(payload, 5, "ACK");
    if (!is_message_type(payload[4]))
        throw ParseError("ACK names unknown message type " + std::to_string(payload[4]), 4);
    return AckPayload{get_u32(payload, 0), static_cast<MessageType>(payload[4])};
}

const char* to_string(NackReason r) noexcept {
    switch (r) {
    case NackReason::out_of_order: return "OUT_OF_ORDER";
    case NackReason::unexpected_type: return "UNEXPECTED_TYPE";
    case NackReason::not_ready: return "NOT_READY";
    case NackReason::corrupt: return "CORRUPT";
    case NackReason::rejected: return "REJECTED";
    }
    return "?";
}

Bytes encode_nack(const NackPayload& nack) {
    Bytes out;
    put_u32(out, nack.seq);
    out.push_back(static_cast<std::uint8_t>(nack.reason));
    return out;
}

NackPayload decode_nack(std::span<const std::uint8_t> payload) {
    require_size(payload, 5, "NACK");
    if (payload[4] < 1 || payload[4] > 5)
        throw ParseError("unknown NACK reason " + std::to_string(payload[4]), 4);
    return NackPayload{get_u32(payload, 0), static_cast<NackReason>(payload[4])};
}

Bytes encode_lure_on(std::optional<double> current_a) {
    Bytes out;
    if (current_a)
        put_u32(out, to_fixed(*current_a, 1e6, "lure current"));
    return out;
}

std::optional<double> decode_lure_on(std::span<const std::uint8_t> payload) {
    if (payload.empty())
        return std::nullopt;
    require_size(payload, 4, "LURE_ON");
    return get_u32(payload, 0) / 1e6;
}

} // namespace finsight::bobproto
