#include "finsight/engine/runtime.hpp"

#include "finsight/common/error.hpp"

#include <array>
#include <chrono>
#include <csignal>
#include <deque>
#include <memory>
#include <set>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace finsight::engine {

namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using error_code = boost::system::error_code;

Timestamp wall_now() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::chrono::steady_clock::duration seconds(double s) {
    return std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(s));
}

class Runtime;

class UiSession : public std::enable_shared_from_this<UiSession> {
public:
    UiSession(tcp::socket socket, Runtime& rt) : ws_(std::move(socket)), rt_(rt) {}

    void start();
    void send(std::string text);
    void close();

private:
    void read();
    void write();

    websocket::stream<beast::tcp_stream> ws_;
    Runtime& rt_;
    beast::flat_buffer buf_;
    std::deque<std::string> queue_;
    bool open_ = false;
};

class Runtime {
public:
    Runtime(EngineCore& core, const RuntimeOptions& opts)
        : core_(core), opts_(opts), ui_acceptor_(io_), bob_(io_), tick_(io_), connect_timer_(io_),
          limit_(io_), grace_(io_), signals_(io_) {}

    RunSummary run();

    void on_ui_text(const std::shared_ptr<UiSession>& from, const std::string& text) {
        route(core_.on_ui_text(wall_now(), text), from);
    }
    void join(const std::shared_ptr<UiSession>& s) {
        sessions_.insert(s);
        s->send(core_.ui_state_message());
    }
    void leave(const std::shared_ptr<UiSession>& s) { sessions_.erase(s); }

private:
    void listen_ui();
    void accept_ui();
    void connect_bob();
    void read_bob();
    void write_bob();
    void tick();
    void route(EngineCore::Output out, const std::shared_ptr<UiSession>& from = nullptr);
    void finish();

    EngineCore& core_;
    const RuntimeOptions& opts_;
    asio::io_context io_;
    tcp::acceptor ui_acceptor_;
    tcp::socket bob_;
    asio::steady_timer tick_;
    asio::steady_timer connect_timer_;
    asio::steady_timer limit_;
    asio::steady_timer grace_;
    asio::signal_set signals_;
    std::set<std::shared_ptr<UiSession>> sessions_;
    std::deque<bobproto::Bytes> bob_queue_;
    std::array<std::uint8_t, 64 * 1024> rbuf_{};
    std::chrono::steady_clock::time_point connect_deadline_;
    bool bob_connected_ = false;
    bool finishing_ = false;
    std::optional<std::string> connect_error_;
};

void UiSession::start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](error_code ec) {
        if (ec)
            return;
        self->open_ = true;
        self->rt_.join(self);
        self->read();
    });
}

void UiSession::read() {
    ws_.async_read(buf_, [self = shared_from_this()](error_code ec, std::size_t) {
        if (ec) {
            self->open_ = false;
            self->rt_.leave(self);
            return;
        }
        const std::string text = beast::buffers_to_string(self->buf_.data());
        self->buf_.consume(self->buf_.size());
        self->rt_.on_ui_text(self, text);
        self->read();
    });
}

void UiSession::send(std::string text) {
    if (!open_)
        return;
    queue_.push_back(std::move(text));
    if (queue_.size() == 1)
        write();
}

void UiSession::write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](error_code ec, std::size_t) {
        self->queue_.pop_front();
        if (ec) {
            self->queue_.clear();
            return;
        }
        if (!self->queue_.empty())
            self->write();
    });
}

void UiSession::close() {
    if (!open_)
        return;
    open_ = false;
    ws_.async_close(websocket::close_code::going_away, [self = shared_from_this()](error_code) {});
}

void Runtime::route(EngineCore::Output out, const std::shared_ptr<UiSession>& from) {
    if (!out.to_bob.empty() && bob_connected_) {
        bob_queue_.push_back(std::move(out.to_bob));
        if (bob_queue_.size() == 1)
            write_bob();
    }
    for (const auto& text : out.to_ui)
        for (const auto& s : sessions_)
            s->send(text);
    if (from)
        for (auto& text : out.reply)
            from->send(std::move(text));
}

void Runtime::listen_ui() {
    try {
        const tcp::endpoint ep(asio::ip::make_address(opts_.ui_host), opts_.ui_port);
        ui_acceptor_.open(ep.protocol());
        ui_acceptor_.set_option(tcp::acceptor::reuse_address(true));
        ui_acceptor_.bind(ep);
        ui_acceptor_.listen();
    } catch (const boost::system::system_error& e) {
        throw IoError("cannot listen for UI clients on " + opts_.ui_host + ":" + std::to_string(opts_.ui_port) +
                      ": " + e.what());
    }
    if (opts_.on_ui_listening)
        opts_.on_ui_listening(ui_acceptor_.local_endpoint().port());
    accept_ui();
}

void Runtime::accept_ui() {
    ui_acceptor_.async_accept([this](error_code ec, tcp::socket socket) {
        if (ec)
            return;
        std::make_shared<UiSession>(std::move(socket), *this)->start();
        accept_ui();
    });
}

void Runtime::connect_bob() {
    error_code ec;
    const tcp::endpoint ep(asio::ip::make_address(opts_.bob_host, ec), opts_.bob_port);
    if (ec) {
        connect_error_ = "bad bob address " + opts_.bob_host;
        finish();
        return;
    }
    bob_.async_connect(ep, [this](error_code cec) {
        if (finishing_)
            return;
        if (!cec) {
            bob_connected_ = true;
            bob_.set_option(tcp::no_delay(true));
            read_bob();
            tick();
            return;
        }
        error_code ignored;
        bob_.close(ignored);
        if (std::chrono::steady_clock::now() >= connect_deadline_) {
            connect_error_ = "cannot reach the bob at " + opts_.bob_host + ":" + std::to_string(opts_.bob_port) +
                             ": " + cec.message();
            finish();
            return;
        }
        connect_timer_.expires_after(std::chrono::milliseconds(100));
        connect_timer_.async_wait([this](error_code tec) {
            if (!tec)
                connect_bob();
        });
    });
}

void Runtime::read_bob() {
    bob_.async_read_some(asio::buffer(rbuf_), [this](error_code ec, std::size_t n) {
        if (ec) {
            route(core_.on_bob_closed(wall_now()));
            bob_connected_ = false;
            finish();
            return;
        }
        route(core_.on_bob_bytes(wall_now(), std::span(rbuf_.data(), n)));
        if (core_.device_gone()) {
            finish();
            return;
        }
        read_bob();
    });
}

void Runtime::write_bob() {
    asio::async_write(bob_, asio::buffer(bob_queue_.front()), [this](error_code ec, std::size_t) {
        bob_queue_.pop_front();
        if (ec) {
            bob_queue_.clear();
            return;
        }
        if (!bob_queue_.empty())
            write_bob();
    });
}

void Runtime::tick() {
    tick_.expires_after(std::chrono::milliseconds(50));
    tick_.async_wait([this](error_code ec) {
        if (ec || finishing_)
            return;
        route(core_.on_tick(wall_now()));
        tick();
    });
}

void Runtime::finish() {
    if (finishing_)
        return;
    finishing_ = true;
    error_code ignored;
    tick_.cancel();
    connect_timer_.cancel();
    limit_.cancel();
    signals_.cancel();
    ui_acceptor_.close(ignored);
    // Let queued UI messages and the last bob commands drain, then close.
    grace_.expires_after(std::chrono::milliseconds(300));
    grace_.async_wait([this](error_code) {
        error_code ignored2;
        bob_.shutdown(tcp::socket::shutdown_both, ignored2);
        bob_.close(ignored2);
        for (const auto& s : sessions_)
            s->close();
        sessions_.clear();
        grace_.expires_after(std::chrono::milliseconds(200));
        grace_.async_wait([this](error_code) { io_.stop(); });
    });
}

RunSummary Runtime::run() {
    listen_ui();
    connect_deadline_ = std::chrono::steady_clock::now() + seconds(opts_.connect_timeout_s);
    connect_bob();
    if (opts_.max_duration_s) {
        limit_.expires_after(seconds(*opts_.max_duration_s));
        limit_.async_wait([this](error_code ec) {
            if (!ec)
                finish();
        });
    }
    if (opts_.handle_signals) {
        signals_.add(SIGINT);
        signals_.add(SIGTERM);
        signals_.async_wait([this](error_code ec, int) {
            if (!ec)
                finish();
        });
    }
    io_.run();
    if (connect_error_)
        throw IoError(*connect_error_);
    RunSummary s;
    s.frames = core_.frames_seen();
    s.records = core_.driver().log().size();
    s.corrupt_frames = core_.corrupt_frames();
    s.storage_errors = core_.storage_errors();
    s.device_said_bye = core_.device_said_bye();
    return s;
}

} // namespace

RunSummary run_engine(EngineCore& core, const RuntimeOptions& opts) {
    Runtime rt(core, opts);
    return rt.run();
}

} // namespace finsight::engine
