#include "finsight/bobproto/codec.hpp"

#include "finsight/common/error.hpp"

#include <algorithm>

#include <zlib.h>

namespace finsight::bobproto {

const char* to_string(MessageType t) noexcept {
    switch (t) {
    case MessageType::hello: return "HELLO";
    case MessageType::frame: return "FRAME";
    case MessageType::lure_on: return "LURE_ON";
    case MessageType::lure_off: return "LURE_OFF";
    case MessageType::ack: return "ACK";
    case MessageType::nack: return "NACK";
    case MessageType::battery: return "BATTERY";
    case MessageType::heartbeat: return "HEARTBEAT";
    case MessageType::bye: return "BYE";
    }
    return "?";
}

bool is_message_type(std::uint8_t code) noexcept {
    return code >= 0x01 && code <= 0x09;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks so huge spans stay correct.
    std::size_t off = 0;
    while (off < bytes.size()) {
        const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
        crc = ::crc32(crc, bytes.data() + off, n);
        off += n;
    }
    return static_cast<std::uint32_t>(crc);
}

namespace {

void put_be(Bytes& out, std::uint32_t v, int width) {
    for (int i = width - 1; i >= 0; --i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_be(const std::uint8_t* p, int width) {
    std::uint32_t v = 0;
    for (int i = 0; i < width; ++i)
        v = (v << 8) | p[i];
    return v;
}

// Offset of the next magic candidate after position 0. A trailing 0xF1 might
// start a frame whose second byte has not arrived yet.
std::size_t resync(std::span<const std::uint8_t> bytes) {
    for (std::size_t i = 1; i < bytes.size(); ++i) {
        if (bytes[i] != kMagic[0])
            continue;
        if (i + 1 == bytes.size() || bytes[i + 1] == kMagic[1])
            return i;
    }
    return bytes.size();
}

} // namespace

void encode_into(const BobMessage& msg, Bytes& out) {
    if (msg.payload.size() > kMaxPayload)
        throw InvalidArgument("payload of " + std::to_string(msg.payload.size()) +
                              " bytes exceeds the 24-bit length field");
    const std::size_t base = out.size();
    out.reserve(base + kHeaderSize + msg.payload.size() + kTrailerSize);
    out.push_back(kMagic[0]);
    out.push_back(kMagic[1]);
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(msg.type));
    put_be(out, msg.seq, 4);
    put_be(out, static_cast<std::uint32_t>(msg.payload.size()), 3);
    out.insert(out.end(), msg.payload.begin(), msg.payload.end());
    const std::span<const std::uint8_t> covered(out.data() + base + 2, out.size() - base - 2);
    put_be(out, crc32(covered), 4);
}

Bytes encode(const BobMessage& msg) {
    Bytes out;
    encode_into(msg, out);
    return out;
}

DecodeResult decode(std::span<const std::uint8_t> bytes) {
    if (bytes.empty())
        return NeedMore{};
    if (bytes[0] != kMagic[0] || (bytes.size() > 1 && bytes[1] != kMagic[1]))
        return Corrupt{"bad magic", resync(bytes)};
    if (bytes.size() > 2 && bytes[2] != kVersion)
        return Corrupt{"unsupported version " + std::to_string(bytes[2]), resync(bytes)};
    if (bytes.size() > 3 && !is_message_type(bytes[3]))
        return Corrupt{"unknown message type " + std::to_string(bytes[3]), resync(bytes)};
    if (bytes.size() < kHeaderSize)
        return NeedMore{};

    const std::size_t length = get_be(bytes.data() + 8, 3);
    const std::size_t total = kHeaderSize + length + kTrailerSize;
    if (bytes.size() < total)
        return NeedMore{};

    const std::uint32_t expected = get_be(bytes.data() + kHeaderSize + length, 4);
    if (crc32(bytes.subspan(2, kHeaderSize - 2 + length)) != expected)
        return Corrupt{"CRC mismatch", resync(bytes)};

    BobMessage msg;
    msg.type = static_cast<MessageType>(bytes[3]);
    msg.seq = get_be(bytes.data() + 4, 4);
    msg.payload.assign(bytes.begin() + kHeaderSize, bytes.begin() + kHeaderSize + length);
    return Decoded{std::move(msg), total};
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
    // Compact once the consumed prefix dominates the buffer.
    if (start_ > 0 && start_ * 2 >= buf_.size()) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(start_));
        start_ = 0;
    }
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<FrameReader::Event> FrameReader::next() {
    const std::span<const std::uint8_t> view(buf_.data() + start_, buf_.size() - start_);
    auto result = decode(view);
    if (auto* d = std::get_if<Decoded>(&result)) {
        start_ += d->consumed;
        return Event{std::move(d->msg)};
    }
    if (auto* c = std::get_if<Corrupt>(&result)) {
        start_ += c->skip;
        return Event{std::move(*c)};
    }
    return std::nullopt;
}

std::optional<Corrupt> FrameReader::finish() {
    const std::size_t left = buffered();
    buf_.clear();
    start_ = 0;
    if (left == 0)
        return std::nullopt;
    return Corrupt{"stream ended inside a frame (" + std::to_string(left) + " bytes)", left};
}

} // namespace finsight::bobproto
