#include "finsight/bobproto/tcp.hpp"

#include "finsight/common/error.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <csignal>
#include <deque>

#include <boost/asio.hpp>

namespace finsight::bobproto {

namespace asio = boost::asio;
using asio::ip::tcp;

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw InvalidArgument("expected HOST:PORT, got \"" + text + "\"");
    unsigned port = 0;
    const char* first = text.data() + colon + 1;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, port);
    if (ec != std::errc{} || ptr != last || port > 65535)
        throw InvalidArgument("bad port in \"" + text + "\"");
    return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

SimulationResult serve_tcp(const SimulatorConfig& cfg, const BatteryModel& battery, const ServeOptions& opts) {
    asio::io_context io;
    tcp::acceptor acceptor(io);
    try {
        const tcp::endpoint ep(asio::ip::make_address(opts.host), opts.port);
        acceptor.open(ep.protocol());
        acceptor.set_option(tcp::acceptor::reuse_address(true));
        acceptor.bind(ep);
        acceptor.listen(1);
    } catch (const boost::system::system_error& e) {
        throw IoError("cannot listen on " + opts.host + ":" + std::to_string(opts.port) + ": " + e.what());
    }
    if (opts.on_listening)
        opts.on_listening(acceptor.local_endpoint().port());

    BobDevice device(cfg, battery);
    tcp::socket socket(io);
    asio::steady_timer timer(io);
    asio::steady_timer limit(io);
    asio::signal_set signals(io);
    std::deque<Bytes> pending;
    bool writing = false;
    bool closing = false;
    std::array<std::uint8_t, 64 * 1024> rbuf{};
    std::chrono::steady_clock::time_point t0;

    auto now_s = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    auto shutdown = [&] {
        closing = true;
        timer.cancel();
        limit.cancel();
        signals.cancel();
        boost::system::error_code ignored;
        acceptor.close(ignored);
        if (!writing) {
            socket.shutdown(tcp::socket::shutdown_both, ignored);
            socket.close(ignored);
        }
    };

    std::function<void()> flush = [&] {
        if (writing || pending.empty())
            return;
        writing = true;
        asio::async_write(socket, asio::buffer(pending.front()), [&](boost::system::error_code ec, std::size_t) {
            writing = false;
            pending.pop_front();
            if (ec) {
                pending.clear();
                shutdown();
                return;
            }
            if (pending.empty() && (closing || device.stopped()))
                shutdown();
            else
                flush();
        });
    };

    auto push_output = [&] {
        Bytes out = device.take_output();
        if (!out.empty())
            pending.push_back(std::move(out));
        flush();
        if (device.stopped() && !writing)
            shutdown();
    };

    std::function<void()> schedule = [&] {
        const auto next = device.next_event_time();
        if (!next || closing)
            return;
        timer.expires_at(t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                  std::chrono::duration<double>(*next)));
        timer.async_wait([&](boost::system::error_code ec) {
            if (ec || closing)
                return;
            device.advance(now_s());
            push_output();
            schedule();
        });
    };

    std::function<void()> read = [&] {
        socket.async_read_some(asio::buffer(rbuf), [&](boost::system::error_code ec, std::size_t n) {
            if (ec) {
                if (!closing)
                    device.advance(now_s());
                shutdown();
                return;
            }
            device.receive(now_s(), std::span(rbuf.data(), n));
            push_output();
            // An inbound command can change the schedule (HELLO starts frames).
            timer.cancel();
            schedule();
            read();
        });
    };

    if (opts.handle_signals) {
        signals.add(SIGINT);
        signals.add(SIGTERM);
        signals.async_wait([&](boost::system::error_code ec, int) {
            if (!ec)
                shutdown();
        });
    }

    acceptor.async_accept(socket, [&](boost::system::error_code ec) {
        if (ec) {
            shutdown();
            return;
        }
        acceptor.close();
        socket.set_option(tcp::no_delay(true));
        t0 = std::chrono::steady_clock::now();
        device.connect();
        push_output();
        schedule();
        read();
        if (opts.max_duration_s) {
            limit.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(*opts.max_duration_s)));
            limit.async_wait([&](boost::system::error_code lec) {
                if (lec)
                    return;
                device.advance(now_s());
                shutdown();
            });
        }
    });

    io.run();
    return {device.trace(), device.battery(), device.lure(), device.stopped()};
}

} // namespace finsight::bobproto
