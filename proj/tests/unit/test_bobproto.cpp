#include "finsight/augment/png_io.hpp"
#include "finsight/bobproto/codec.hpp"
#include "finsight/bobproto/payloads.hpp"
#include "finsight/bobproto/simulator.hpp"
#include "finsight/common/error.hpp"
#include "oracles/crc_oracle.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

using namespace finsight::bobproto;

namespace {

BobMessage random_message(std::mt19937_64& rng, std::size_t max_payload = 300) {
    std::uniform_int_distribution<int> type(1, 9);
    std::uniform_int_distribution<std::size_t> len(0, max_payload);
    BobMessage m;
    m.type = static_cast<MessageType>(type(rng));
    m.seq = static_cast<std::uint32_t>(rng());
    m.payload.resize(len(rng));
    for (auto& b : m.payload)
        b = static_cast<std::uint8_t>(rng());
    return m;
}

// Feeds a complete stream and reports whether any message came out intact.
struct StreamOutcome {
    std::vector<BobMessage> messages;
    std::size_t corrupt = 0;
};

StreamOutcome read_stream(const Bytes& bytes) {
    FrameReader r;
    r.feed(bytes);
    StreamOutcome out;
    while (auto ev = r.next()) {
        if (auto* m = std::get_if<BobMessage>(&*ev))
            out.messages.push_back(*m);
        else
            ++out.corrupt;
    }
    if (r.finish())
        ++out.corrupt;
    return out;
}

std::shared_ptr<FrameSource> tiny_source() {
    SyntheticSceneSource::Config cfg;
    cfg.width = 16;
    cfg.height = 12;
    cfg.scene.objects.push_back({"bass", 1.0, {4, 4, 6, 3}});
    return std::make_shared<SyntheticSceneSource>(cfg);
}

SimulatorConfig sim_config(double fps = 24.0) {
    SimulatorConfig cfg;
    cfg.fps = fps;
    cfg.frame_source = tiny_source();
    return cfg;
}

std::size_t count_out(const SessionTrace& t, MessageType type) {
    return static_cast<std::size_t>(std::count_if(t.begin(), t.end(), [&](const TraceEntry& e) {
        return e.dir == Direction::out && e.type == type;
    }));
}

} // namespace

TEST_CASE("crc32 agrees with the bitwise oracle") {
    const std::string check = "123456789";
    const Bytes b(check.begin(), check.end());
    CHECK(crc32(b) == 0xCBF43926u);
    CHECK(oracle::crc32(b, 0, b.size()) == 0xCBF43926u);
    CHECK(crc32(Bytes{}) == 0u);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        Bytes v(rng() % 1000);
        for (auto& x : v)
            x = static_cast<std::uint8_t>(rng());
        CHECK(crc32(v) == oracle::crc32(v, 0, v.size()));
    }
}

TEST_CASE("heartbeat frame layout") {
    const Bytes f = encode({MessageType::heartbeat, 0, {}});
    REQUIRE(f.size() == 15);
    const Bytes head{0xF1, 0x5B, 0x01, 0x08, 0, 0, 0, 0, 0, 0, 0};
    CHECK(Bytes(f.begin(), f.begin() + 11) == head);
    const std::uint32_t crc = oracle::crc32(f, 2, 11);
    CHECK(f[11] == (crc >> 24));
    CHECK(f[12] == ((crc >> 16) & 0xFF));
    CHECK(f[13] == ((crc >> 8) & 0xFF));
    CHECK(f[14] == (crc & 0xFF));
}

TEST_CASE("seq and length are big-endian") {
    const Bytes f = encode({MessageType::frame, 0x01020304u, Bytes(0x010203, 0xAA)});
    CHECK(f[4] == 1);
    CHECK(f[7] == 4);
    CHECK(f[8] == 1);
    CHECK(f[9] == 2);
    CHECK(f[10] == 3);
}

TEST_CASE("encode/decode round trip and determinism") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 10000; ++i) {
        const BobMessage m = random_message(rng);
        const Bytes a = encode(m);
        CHECK(a == encode(m));
        const auto r = decode(a);
        REQUIRE(std::holds_alternative<Decoded>(r));
        CHECK(std::get<Decoded>(r).msg == m);
        CHECK(std::get<Decoded>(r).consumed == a.size());
    }
}

TEST_CASE("payload length cap") {
    BobMessage m{MessageType::frame, 1, Bytes(kMaxPayload + 1)};
    CHECK_THROWS_AS(encode(m), finsight::InvalidArgument);
    m.payload.resize(kMaxPayload);
    const Bytes f = encode(m);
    CHECK(f.size() == kHeaderSize + kMaxPayload + kTrailerSize);
    CHECK(std::get<Decoded>(decode(f)).msg.payload.size() == kMaxPayload);
}

TEST_CASE("prefixes need more, concatenation decodes the first frame") {
    CHECK(std::holds_alternative<NeedMore>(decode(Bytes{})));
    const Bytes a = encode({MessageType::ack, 5, {0, 0, 0, 1, 3}});
    const Bytes b = encode({MessageType::bye, 6, {}});
    for (std::size_t n = 0; n < a.size(); ++n)
        CHECK(std::holds_alternative<NeedMore>(decode(std::span(a.data(), n))));
    Bytes both = a;
    both.insert(both.end(), b.begin(), b.end());
    const auto r = decode(both);
    REQUIRE(std::holds_alternative<Decoded>(r));
    CHECK(std::get<Decoded>(r).consumed == a.size());
    CHECK(std::get<Decoded>(r).msg.seq == 5);
}

TEST_CASE("every single-bit flip is detected") {
    const Bytes frame = encode({MessageType::frame, 42, {0, 0, 0, 7, 'p', 'n', 'g', 0x00, 0xFF, 0x5B}});
    for (std::size_t bit = 0; bit < frame.size() * 8; ++bit) {
        Bytes f = frame;
        f[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        const auto out = read_stream(f);
        CHECK_MESSAGE(out.messages.empty(), "bit " << bit);
        CHECK(out.corrupt >= 1);
    }
}

TEST_CASE("every double-bit flip in a small frame is detected") {
    const Bytes frame = encode({MessageType::battery, 3, {0, 0, 0x0F, 0xA0, 0, 0, 0x65}});
    const std::size_t bits = frame.size() * 8;
    std::size_t cases = 0;
    for (std::size_t i = 0; i < bits; ++i)
        for (std::size_t j = i + 1; j < bits; ++j) {
            Bytes f = frame;
            f[i / 8] ^= static_cast<std::uint8_t>(1u << (i % 8));
            f[j / 8] ^= static_cast<std::uint8_t>(1u << (j % 8));
            if (!read_stream(f).messages.empty())
                FAIL("undetected flip of bits " << i << " and " << j);
            ++cases;
        }
    CHECK(cases == bits * (bits - 1) / 2);
}

TEST_CASE("resync skips garbage to the next frame") {
    const Bytes good = encode({MessageType::heartbeat, 9, {}});
    Bytes stream{0x00, 0xF1, 0x00, 0x13, 0xF1};
    stream.insert(stream.end(), good.begin(), good.end());
    const auto out = read_stream(stream);
    REQUIRE(out.messages.size() == 1);
    CHECK(out.messages[0].seq == 9);
    CHECK(out.corrupt >= 1);

    // A corrupted frame does not take the following one down with it.
    Bytes bad = encode({MessageType::ack, 1, {1, 2, 3, 4, 5}});
    bad[12] ^= 0x10;
    bad.insert(bad.end(), good.begin(), good.end());
    const auto out2 = read_stream(bad);
    REQUIRE(out2.messages.size() == 1);
    CHECK(out2.messages[0].type == MessageType::heartbeat);
}

TEST_CASE("byte-at-a-time feeding matches bulk decoding") {
    std::mt19937_64 rng(5);
    Bytes stream;
    std::vector<BobMessage> sent;
    for (int i = 0; i < 50; ++i) {
        sent.push_back(random_message(rng, 40));
        encode_into(sent.back(), stream);
    }
    FrameReader r;
    std::vector<BobMessage> got;
    for (auto b : stream) {
        r.feed(std::span(&b, 1));
        while (auto ev = r.next())
            got.push_back(std::get<BobMessage>(*ev));
    }
    CHECK(got == sent);
    CHECK_FALSE(r.finish());
}

TEST_CASE("decode is total on random bytes") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100000; ++i) {
        Bytes junk(rng() % 64);
        for (auto& b : junk)
            b = static_cast<std::uint8_t>(rng());
        // Bias some inputs towards a valid-looking header.
        if (junk.size() >= 4 && i % 2 == 0) {
            junk[0] = 0xF1;
            junk[1] = 0x5B;
            junk[2] = 0x01;
            junk[3] = static_cast<std::uint8_t>(1 + rng() % 9);
        }
        const auto r = decode(junk);
        if (const auto* c = std::get_if<Corrupt>(&r)) {
            CHECK(c->skip >= 1);
            CHECK(c->skip <= junk.size());
        }
        if (const auto* d = std::get_if<Decoded>(&r))
            CHECK(d->consumed <= junk.size());
        const auto s = read_stream(junk);  // must terminate
        (void)s;
    }
}

TEST_CASE("payload codecs") {
    CHECK(decode_hello(encode_hello({"bob", 24, 2600})) == HelloInfo{"bob", 24, 2600});
    CHECK_THROWS_AS(decode_hello(Bytes{'{'}), finsight::ParseError);
    CHECK_THROWS_AS(decode_hello(Bytes{'[', ']'}), finsight::ParseError);

    const FramePayload fp{0xDEADBEEF, {1, 2, 3}};
    CHECK(decode_frame(encode_frame(fp)) == fp);
    CHECK_THROWS_AS(decode_frame(Bytes{1, 2}), finsight::ParseError);

    const auto br = decode_battery(encode_battery({400.04, 2600}));
    CHECK(br.consumed_mah == doctest::Approx(400.0));
    CHECK(br.capacity_mah == 2600.0);
    CHECK(encode_battery({12.3, 2600}) == Bytes{0, 0, 0, 123, 0, 0, 0x65, 0x90});
    CHECK_THROWS_AS(decode_battery(Bytes(7)), finsight::ParseError);

    CHECK(decode_ack(encode_ack({77, MessageType::lure_on})) == AckPayload{77, MessageType::lure_on});
    CHECK_THROWS_AS(decode_ack(Bytes{0, 0, 0, 1, 0x20}), finsight::ParseError);
    CHECK(decode_nack(encode_nack({3, NackReason::not_ready})) == NackPayload{3, NackReason::not_ready});
    CHECK_THROWS_AS(decode_nack(Bytes{0, 0, 0, 1, 9}), finsight::ParseError);

    CHECK_FALSE(decode_lure_on(encode_lure_on(std::nullopt)));
    CHECK(*decode_lure_on(encode_lure_on(0.020)) == doctest::Approx(0.020));
    CHECK(encode_lure_on(0.020) == Bytes{0, 0, 0x4E, 0x20});
}

TEST_CASE("battery drain arithmetic") {
    ScriptedPeer p0;
    CHECK(simulate(sim_config(), {}, p0, 0.0).battery.consumed_mah == 0.0);

    ScriptedPeer p1;
    const auto half = simulate(sim_config(), {}, p1, 1.5 * 3600);
    CHECK(half.battery.consumed_mah == doctest::Approx(200.0).epsilon(1e-9));

    ScriptedPeer p2;
    const auto full = simulate(sim_config(), {}, p2, 3 * 3600);
    CHECK(std::abs(full.battery.consumed_mah - 400.0) <= 0.4);
    CHECK(p2.frames() == 3 * 3600 * 24 + 1);  // frames at 0 s and at 3 h both count
    CHECK(p2.heartbeats() == 3 * 3600);
    CHECK(p2.battery_reports().size() == 3 * 360);
    CHECK(p2.battery_reports().back().consumed_mah == doctest::Approx(400.0).epsilon(1e-3));
}

TEST_CASE("battery conservation across mode changes") {
    // Idle until HELLO at 50 s, stream, lure on for 300 s, then off.
    ScriptedPeer peer(
        {
            {50.0, MessageType::hello, encode_hello({"engine", 0, 0}), {}},
            {100.0, MessageType::lure_on, encode_lure_on(0.020), {}},
            {400.0, MessageType::lure_off, {}, {}},
        },
        false);
    BatteryModel b;
    const auto r = simulate(sim_config(), b, peer, 1000.0);
    const double closed = (b.idle_draw_ma * 50 + b.stream_draw_ma * 950 + b.lure_draw_ma * 300) / 3600.0;
    CHECK(std::abs(r.battery.consumed_mah - closed) <= 1e-9 * closed);
    CHECK(peer.acks().size() == 3);
    CHECK_FALSE(r.lure.active);
}

TEST_CASE("device stops with BYE when the cell is empty") {
    BatteryModel b;
    b.capacity_mah = 1.0;  // 27 s at the streaming draw
    ScriptedPeer peer;
    const auto r = simulate(sim_config(), b, peer, 3600.0);
    CHECK(r.stopped);
    CHECK(peer.saw_bye());
    CHECK(r.battery.consumed_mah == 1.0);
    const auto& last = r.trace.back();
    CHECK(last.type == MessageType::bye);
    CHECK(last.t_s == doctest::Approx(27.0).epsilon(1e-12));
    // Nothing is sent after BYE; the frame due at the depletion instant may
    // land on either side of it by rounding.
    const auto frames = count_out(r.trace, MessageType::frame);
    CHECK(frames >= 27 * 24);
    CHECK(frames <= 27 * 24 + 1);
    for (const auto& e : r.trace)
        CHECK(e.t_s <= last.t_s);
}

TEST_CASE("frames, heartbeats and battery reports follow the clock") {
    ScriptedPeer peer;
    const auto r = simulate(sim_config(), {}, peer, 20.0);
    CHECK(frame_rate_probe(r.trace, 10.0) == 24.0);
    for (double start : {0.0, 0.01, 3.5, 7.77, 9.99})
        for (double w : {1.0, 2.0, 5.0, 10.0})
            CHECK(frame_rate_probe(r.trace, w, start) == 24.0);
    CHECK(count_out(r.trace, MessageType::heartbeat) == 20);
    CHECK(count_out(r.trace, MessageType::battery) == 2);
    CHECK(peer.device_hello()->fps == 24.0);

    ScriptedPeer slow;
    const auto r1 = simulate(sim_config(1.0), {}, slow, 10.0);
    CHECK(frame_rate_probe(r1.trace, 5.0) == 1.0);

    CHECK_THROWS_AS(frame_rate_probe(r.trace, 0.0), finsight::InvalidArgument);
    CHECK_THROWS_AS(frame_rate_probe(SessionTrace{}, 1.0), finsight::InvalidArgument);
}

TEST_CASE("seq per direction is strictly increasing") {
    ScriptedPeer peer({{1.0, MessageType::lure_on, {}, {}}, {2.0, MessageType::lure_off, {}, {}}});
    const auto r = simulate(sim_config(), {}, peer, 5.0);
    std::optional<std::uint32_t> last;
    for (const auto& e : r.trace)
        if (e.dir == Direction::out) {
            if (last)
                CHECK(e.seq > *last);
            last = e.seq;
        }
}

TEST_CASE("device NACKs protocol violations") {
    SUBCASE("command before HELLO") {
        ScriptedPeer peer({{1.0, MessageType::lure_on, {}, {}}}, false);
        const auto r = simulate(sim_config(), {}, peer, 2.0);
        REQUIRE(peer.nacks().size() == 1);
        CHECK(peer.nacks()[0].reason == NackReason::not_ready);
        CHECK_FALSE(r.lure.active);
    }
    SUBCASE("out-of-order seq") {
        ScriptedPeer peer({{1.0, MessageType::lure_on, {}, {}}, {2.0, MessageType::lure_off, {}, 0u}});
        const auto r = simulate(sim_config(), {}, peer, 3.0);
        REQUIRE(peer.nacks().size() == 1);
        CHECK(peer.nacks()[0].reason == NackReason::out_of_order);
        CHECK(peer.nacks()[0].seq == 0);
        CHECK(r.lure.active);  // the stale LURE_OFF was not applied
        CHECK(r.lure.computed_voltage_v == 436.0);
    }
    SUBCASE("device-only message types") {
        ScriptedPeer peer({{1.0, MessageType::frame, {0, 0, 0, 1}, {}}, {1.5, MessageType::battery, Bytes(8), {}}});
        simulate(sim_config(), {}, peer, 2.0);
        REQUIRE(peer.nacks().size() == 2);
        CHECK(peer.nacks()[0].reason == NackReason::unexpected_type);
    }
    SUBCASE("unsafe lure current") {
        ScriptedPeer peer({{1.0, MessageType::lure_on, encode_lure_on(0.090), {}}});
        const auto r = simulate(sim_config(), {}, peer, 2.0);
        REQUIRE(peer.nacks().size() == 1);
        CHECK(peer.nacks()[0].reason == NackReason::rejected);
        CHECK_FALSE(r.lure.active);
    }
}

TEST_CASE("corrupt inbound bytes draw a NACK and the link survives") {
    BobDevice dev(sim_config(), {});
    dev.connect();
    dev.take_output();
    Bytes hello = encode({MessageType::hello, 0, encode_hello({"engine", 0, 0})});
    dev.receive(0.0, hello);
    Bytes bad = encode({MessageType::lure_on, 1, {}});
    bad[5] ^= 1;
    dev.receive(0.5, bad);
    dev.receive(0.6, encode({MessageType::lure_on, 2, {}}));
    const auto out = read_stream(dev.take_output());
    std::vector<MessageType> types;
    for (const auto& m : out.messages)
        if (m.type == MessageType::ack || m.type == MessageType::nack)
            types.push_back(m.type);
    CHECK(types == std::vector{MessageType::ack, MessageType::nack, MessageType::ack});
    CHECK(dev.lure().active);
}

TEST_CASE("simulation is deterministic under the virtual clock") {
    auto run = [] {
        ScriptedPeer peer({{3.0, MessageType::lure_on, {}, {}}, {4.0, MessageType::lure_off, {}, {}}});
        return simulate(sim_config(), {}, peer, 30.0);
    };
    const auto a = run(), b = run();
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].t_s == b.trace[i].t_s);
        CHECK(a.trace[i].type == b.trace[i].type);
        CHECK(a.trace[i].seq == b.trace[i].seq);
        CHECK(a.trace[i].consumed_mah == b.trace[i].consumed_mah);
    }
}

TEST_CASE("directory frame source cycles in lexical order") {
    const auto dir = std::filesystem::temp_directory_path() / "finsight_frames_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    for (int i = 0; i < 3; ++i)
        finsight::augment::write_png(dir / ("f" + std::to_string(i) + ".png"),
                                     finsight::augment::ImageBuffer(4, 4, 1, static_cast<std::uint8_t>(i * 50)));
    DirectorySource src(dir);
    CHECK(src.size() == 3);
    CHECK(finsight::augment::decode_png(src.png(4)).at(0, 0, 0) == 50);
    std::filesystem::remove_all(dir);
    CHECK_THROWS(DirectorySource(dir));
}
