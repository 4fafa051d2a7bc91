#pragma once

#include "finsight/bobproto/codec.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace finsight::bobproto {

// Typed views of message payloads. Decoders throw ParseError on malformed
// payloads; the connection itself stays usable.

/// HELLO carries a small JSON object. Devices fill every field; the engine's
/// reply only needs `device` (its own name).
struct HelloInfo {
    std::string device;
    double fps = 0.0;
    double capacity_mah = 0.0;

    bool operator==(const HelloInfo&) const = default;
};

Bytes encode_hello(const HelloInfo& info);
HelloInfo decode_hello(std::span<const std::uint8_t> payload);

struct FramePayload {
    std::uint32_t frame_id = 0;
    Bytes png;

    bool operator==(const FramePayload&) const = default;
};

Bytes encode_frame(const FramePayload& frame);
FramePayload decode_frame(std::span<const std::uint8_t> payload);

/// Both values travel as u32 BE tenths of mAh.
struct BatteryReport {
    double consumed_mah = 0.0;
    double capacity_mah = 0.0;
};

Bytes encode_battery(const BatteryReport& report);
BatteryReport decode_battery(std::span<const std::uint8_t> payload);

struct AckPayload {
    std::uint32_t acked_seq = 0;
    MessageType acked_type = MessageType::heartbeat;

    bool operator==(const AckPayload&) const = default;
};

Bytes encode_ack(const AckPayload& ack);
AckPayload decode_ack(std::span<const std::uint8_t> payload);

enum class NackReason : std::uint8_t {
    out_of_order = 1,  // seq not above the last accepted one
    unexpected_type = 2,
    not_ready = 3,  // command before the HELLO exchange
    corrupt = 4,  // undecodable frame or payload
    rejected = 5,  // well-formed but refused, e.g. an unsafe lure current
};

const char* to_string(NackReason r) noexcept;

struct NackPayload {
    std::uint32_t seq = 0;
    NackReason reason = NackReason::corrupt;

    bool operator==(const NackPayload&) const = default;
};

Bytes encode_nack(const NackPayload& nack);
NackPayload decode_nack(std::span<const std::uint8_t> payload);

/// LURE_ON optionally carries the commanded current as u32 BE microamps.
Bytes encode_lure_on(std::optional<double> current_a);
std::optional<double> decode_lure_on(std::span<const std::uint8_t> payload);

} // namespace finsight::bobproto
