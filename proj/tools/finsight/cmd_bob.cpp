#include "cli_common.hpp"

#include "finsight/bobproto/simulator.hpp"
#include "finsight/bobproto/tcp.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

namespace finsight::cli {

using namespace finsight::bobproto;

namespace {

struct SimulateOptions {
    SourceOptions source;
    std::string listen;
    double fps = 24.0;
    std::string clock = "virtual";
    BatteryModel battery;
    std::optional<double> duration_s;
    std::filesystem::path trace;
    std::string name = "bob-sim";
};

nlohmann::ordered_json summarize(const SimulationResult& r, const std::string& clock) {
    nlohmann::ordered_json j;
    j["clock"] = clock;
    const auto frames = std::count_if(r.trace.begin(), r.trace.end(), [](const TraceEntry& e) {
        return e.dir == Direction::out && e.type == MessageType::frame;
    });
    j["frames"] = frames;
    j["duration_s"] = r.trace.empty() ? 0.0 : r.trace.back().t_s;
    // Achieved rate over the longest whole-second window after the first frame.
    const auto first = std::find_if(r.trace.begin(), r.trace.end(), [](const TraceEntry& e) {
        return e.dir == Direction::out && e.type == MessageType::frame;
    });
    if (first != r.trace.end()) {
        const double window = std::floor(r.trace.back().t_s - first->t_s);
        if (window >= 1.0) {
            j["fps"] = frame_rate_probe(r.trace, window);
            j["fps_window_s"] = window;
        }
    }
    j["capacity_mah"] = r.battery.capacity_mah;
    j["consumed_mah"] = r.battery.consumed_mah;
    j["remaining_mah"] = r.battery.remaining_mah();
    j["stopped"] = r.stopped;
    j["said_bye"] = std::any_of(r.trace.begin(), r.trace.end(), [](const TraceEntry& e) {
        return e.dir == Direction::out && e.type == MessageType::bye;
    });
    return j;
}

void write_trace(const std::filesystem::path& path, const SessionTrace& trace) {
    std::ofstream out(path);
    if (!out)
        throw CliError(Exit::cant_create, "cannot write " + path.string());
    for (const auto& e : trace)
        out << trace_entry_to_json(e).dump() << "\n";
}

void run_simulate(const SimulateOptions& o) {
    SimulatorConfig cfg;
    cfg.fps = o.fps;
    cfg.device_name = o.name;
    cfg.clock = o.clock == "real" ? ClockKind::real_time : ClockKind::virtual_clock;
    cfg.frame_source = o.source.make(o.fps);
    cfg.validate();
    o.battery.validate();

    SimulationResult result;
    if (cfg.clock == ClockKind::virtual_clock) {
        if (!o.listen.empty())
            throw CliError(Exit::usage, "--listen needs --clock real; the virtual clock runs offline");
        ScriptedPeer peer;
        result = simulate(cfg, o.battery, peer, o.duration_s.value_or(3.0 * 3600.0));
    } else {
        if (o.listen.empty())
            throw CliError(Exit::usage, "--clock real needs --listen HOST:PORT");
        const auto [host, port] = parse_endpoint(o.listen);
        ServeOptions serve;
        serve.host = host;
        serve.port = port;
        serve.max_duration_s = o.duration_s;
        serve.handle_signals = true;
        serve.on_listening = [&](std::uint16_t bound) {
            std::cerr << "bob listening on " << host << ":" << bound << std::endl;
        };
        try {
            result = serve_tcp(cfg, o.battery, serve);
        } catch (const IoError& e) {
            throw CliError(Exit::unavailable, e.what());
        }
    }
    if (!o.trace.empty())
        write_trace(o.trace, result.trace);
    std::cout << summarize(result, o.clock).dump() << "\n";
}

} // namespace

void add_bob(CLI::App& app, Globals&) {
    auto* bob = app.add_subcommand("bob", "Smart-bob device simulator");
    bob->require_subcommand(1);

    auto o = std::make_shared<SimulateOptions>();
    auto* sim = bob->add_subcommand("simulate", "Run the bob: offline on a virtual clock, or over TCP in real time");
    o->source.add_to(sim);
    sim->add_option("--listen", o->listen, "HOST:PORT to accept the engine on (real clock)");
    sim->add_option("--fps", o->fps, "Frame rate")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--clock", o->clock, "virtual or real")
        ->capture_default_str()
        ->check(CLI::IsMember({"virtual", "real"}));
    sim->add_option("--capacity-mah", o->battery.capacity_mah, "Battery capacity")->capture_default_str();
    sim->add_option("--stream-ma", o->battery.stream_draw_ma, "Draw while streaming")->capture_default_str();
    sim->add_option("--idle-ma", o->battery.idle_draw_ma, "Draw while idle")->capture_default_str();
    sim->add_option("--lure-ma", o->battery.lure_draw_ma, "Extra draw while the lure is on")->capture_default_str();
    sim->add_option("--duration", o->duration_s,
                    "Seconds to run; virtual default 10800, real default until the battery or peer ends it")
        ->check(CLI::PositiveNumber);
    sim->add_option("--trace", o->trace, "Write every message as JSON lines");
    sim->add_option("--name", o->name, "Device name sent in HELLO")->capture_default_str();
    sim->callback([o] { run_simulate(*o); });
}

} // namespace finsight::cli
