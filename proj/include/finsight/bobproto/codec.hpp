#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace finsight::bobproto {

// Wire frame:
//   F1 5B | version | type | seq u32 BE | length u24 BE | payload | CRC-32 BE
// The CRC covers version through the end of the payload.

inline constexpr std::array<std::uint8_t, 2> kMagic{0xF1, 0x5B};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 11;
inline constexpr std::size_t kTrailerSize = 4;
inline constexpr std::size_t kMaxPayload = 0xFFFFFF;

enum class MessageType : std::uint8_t {
    hello = 0x01,
    frame = 0x02,
    lure_on = 0x03,
    lure_off = 0x04,
    ack = 0x05,
    nack = 0x06,
    battery = 0x07,
    heartbeat = 0x08,
    bye = 0x09,
};

const char* to_string(MessageType t) noexcept;
bool is_message_type(std::uint8_t code) noexcept;

using Bytes = std::vector<std::uint8_t>;

struct BobMessage {
    MessageType type = MessageType::heartbeat;
    std::uint32_t seq = 0;
    Bytes payload;

    bool operator==(const BobMessage&) const = default;
};

/// CRC-32/IEEE (reflected 0xEDB88320, init and final xor all ones).
std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

/// Throws InvalidArgument when the payload exceeds kMaxPayload.
Bytes encode(const BobMessage& msg);
void encode_into(const BobMessage& msg, Bytes& out);

struct Decoded {
    BobMessage msg;
    std::size_t consumed;
};

struct NeedMore {};

/// `skip` bytes can be discarded to reach the next plausible frame start.
struct Corrupt {
    std::string reason;
    std::size_t skip;
};

using DecodeResult = std::variant<Decoded, NeedMore, Corrupt>;

/// Parses at most one frame from the front of `bytes`. Total on arbitrary input.
DecodeResult decode(std::span<const std::uint8_t> bytes);

/// Stream reassembler: feed bytes as they arrive, pull messages and
/// corruption reports in order.
class FrameReader {
public:
    using Event = std::variant<BobMessage, Corrupt>;

    void feed(std::span<const std::uint8_t> bytes);
    std::optional<Event> next();
    /// End of stream. Leftover bytes form a frame that can never complete.
    std::optional<Corrupt> finish();
    std::size_t buffered() const noexcept { return buf_.size() - start_; }

private:
    Bytes buf_;
    std::size_t start_ = 0;
};

} // namespace finsight::bobproto
