#include "cli_common.hpp"

#include "finsight/bobproto/simulator.hpp"
#include "finsight/bobproto/tcp.hpp"
#include "finsight/engine/engine_core.hpp"
#include "finsight/engine/runtime.hpp"
#include "finsight/engine/virtual_peer.hpp"
#include "finsight/session/catch_log.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

namespace finsight::cli {

namespace {

struct EngineOptions {
    std::filesystem::path regs;
    std::filesystem::path log = "catch_log.jsonl";
    std::filesystem::path trace;
    std::string detector = "blob";
    std::string species = "fish";
    int tolerance = 0;
    std::string depth = "constant:1.0";
    std::string camera = "pinhole";
    double focal = 800.0;
    std::optional<double> cx;
    std::optional<double> cy;
    double lure_current = 0.020;
    std::string auto_release = "off";
    double measure_timeout_s = 10.0;
    double decision_timeout_s = 60.0;

    void add_to(CLI::App* cmd);
    engine::EngineConfig build() const;
};

void EngineOptions::add_to(CLI::App* cmd) {
    cmd->add_option("--regs", regs, "Regulation JSON file")->required();
    cmd->add_option("--log", log, "Catch log (JSON lines, appended)")->capture_default_str();
    cmd->add_option("--trace", trace, "Record session events for replay");
    cmd->add_option("--detector", detector, "blob or sidecar:FILE")->capture_default_str();
    cmd->add_option("--species", species, "Species reported by the blob detector")->capture_default_str();
    cmd->add_option("--tolerance", tolerance, "Blob detector colour tolerance")->capture_default_str();
    cmd->add_option("--depth", depth, "constant:METRES or scene:FILE")->capture_default_str();
    cmd->add_option("--camera", camera, "pinhole or equidistant_fisheye")->capture_default_str();
    cmd->add_option("--focal", focal, "Focal length in pixels")->capture_default_str()->check(CLI::PositiveNumber);
    auto* cx_opt = cmd->add_option("--cx", cx, "Principal point x; default is the frame centre");
    auto* cy_opt = cmd->add_option("--cy", cy, "Principal point y; default is the frame centre");
    cx_opt->needs(cy_opt);
    cy_opt->needs(cx_opt);
    cmd->add_option("--lure-current", lure_current, "Lure current in amperes")->capture_default_str();
    cmd->add_option("--auto-release", auto_release, "Release MUST_RELEASE fish without asking")
        ->capture_default_str()
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--measure-timeout", measure_timeout_s, "Seconds to wait for a length")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--decision-timeout", decision_timeout_s, "Seconds to wait for the operator")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

std::pair<std::string, std::string> split_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        return {spec, ""};
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::chrono::milliseconds to_ms(double s) {
    return std::chrono::milliseconds(std::llround(s * 1000.0));
}

engine::EngineConfig EngineOptions::build() const {
    engine::EngineConfig cfg;
    require_input(regs);
    cfg.regulations = std::make_shared<regulations::RegulationSet>(regulations::load_regulations(regs));

    const auto [det_kind, det_arg] = split_spec(detector);
    if (det_kind == "blob" && det_arg.empty()) {
        vision::BlobDetector::Config bc;
        bc.species = species;
        bc.tolerance = tolerance;
        cfg.detector = std::make_shared<vision::BlobDetector>(bc);
    } else if (det_kind == "sidecar" && !det_arg.empty()) {
        require_input(det_arg);
        cfg.detector = std::make_shared<vision::SidecarDetector>(vision::SidecarDetector::load(det_arg));
    } else {
        throw CliError(Exit::usage, "--detector: expected blob or sidecar:FILE, got '" + detector + "'");
    }

    const auto [depth_kind, depth_arg] = split_spec(depth);
    if (depth_kind == "constant") {
        double metres = 0.0;
        try {
            metres = std::stod(depth_arg);
        } catch (const std::logic_error&) {
            throw CliError(Exit::usage, "--depth: bad distance in '" + depth + "'");
        }
        cfg.depth = std::make_shared<vision::ConstantDepthProvider>(metres);
    } else if (depth_kind == "scene" && !depth_arg.empty()) {
        require_input(depth_arg);
        cfg.depth = std::make_shared<vision::SceneDepthProvider>(vision::load_scene(depth_arg));
    } else {
        throw CliError(Exit::usage, "--depth: expected constant:METRES or scene:FILE, got '" + depth + "'");
    }

    cfg.camera.model = vision::camera_model_from_string(camera);
    cfg.camera.focal_px = focal;
    if (cx) {
        cfg.camera.cx = *cx;
        cfg.camera.cy = *cy;
    } else {
        cfg.center_principal_point = true;
    }
    cfg.lure_current_a = lure_current;
    cfg.session.auto_release = auto_release == "on";
    cfg.session.measure_timeout = to_ms(measure_timeout_s);
    cfg.session.decision_timeout = to_ms(decision_timeout_s);
    cfg.log_path = log;
    if (!trace.empty())
        cfg.trace_path = trace;
    return cfg;
}

nlohmann::ordered_json outcome_counts(const engine::EngineCore& core) {
    nlohmann::ordered_json j = {{"KEPT", 0}, {"RELEASED", 0}, {"LOST", 0}};
    for (const auto& r : core.driver().log())
        j[regulations::to_string(r.outcome)] = j[regulations::to_string(r.outcome)].get<int>() + 1;
    return j;
}

struct RunOptions {
    EngineOptions engine;
    std::string bob;
    std::string ui_listen = "127.0.0.1:8765";
    std::optional<double> duration_s;
    double connect_timeout_s = 5.0;
};

void run_engine_cmd(const RunOptions& o, const Globals& g) {
    engine::EngineConfig cfg = o.engine.build();
    cfg.on_diagnostic = [&g](const std::string& line) {
        if (g.verbose > 0)
            std::cerr << "engine: " << line << "\n";
    };
    engine::EngineCore core(std::move(cfg));
    engine::RuntimeOptions rt;
    try {
        std::tie(rt.bob_host, rt.bob_port) = bobproto::parse_endpoint(o.bob);
        std::tie(rt.ui_host, rt.ui_port) = bobproto::parse_endpoint(o.ui_listen);
    } catch (const InvalidArgument& e) {
        throw CliError(Exit::usage, e.what());
    }
    rt.connect_timeout_s = o.connect_timeout_s;
    rt.max_duration_s = o.duration_s;
    rt.handle_signals = true;
    rt.on_ui_listening = [&](std::uint16_t port) {
        std::cerr << "ui listening on ws://" << rt.ui_host << ":" << port << std::endl;
    };
    engine::RunSummary s;
    try {
        s = engine::run_engine(core, rt);
    } catch (const IoError& e) {
        throw CliError(Exit::unavailable, e.what());
    }
    nlohmann::ordered_json j;
    j["frames"] = s.frames;
    j["records"] = s.records;
    j["outcomes"] = outcome_counts(core);
    j["corrupt_frames"] = s.corrupt_frames;
    j["storage_errors"] = s.storage_errors;
    j["device_said_bye"] = s.device_said_bye;
    std::cout << j.dump() << "\n";
}

struct SimulateOptions {
    EngineOptions engine;
    SourceOptions source;
    double fps = 24.0;
    double duration_s = 60.0;
    std::string start = "2024-07-04T06:00:00.000Z";
    std::string op = "follow";
    std::filesystem::path ui_dump;
    double op_delay_s = 2.0;
    bobproto::BatteryModel battery;
};

void run_simulate(const SimulateOptions& o) {
    engine::EngineCore core(o.engine.build());
    const Timestamp origin = parse_iso8601(o.start);
    const std::string policy = o.op;
    const double delay = o.op_delay_s;
    engine::EnginePeer peer(core, origin, [policy, delay](const nlohmann::json& m)
                                              -> std::optional<engine::EnginePeer::Reply> {
        if (policy == "none" || m.value("type", "") != "verdict")
            return std::nullopt;
        std::string value = policy;
        if (policy == "follow")
            value = m.value("decision", "") == "KEEP_ALLOWED" ? "keep" : "release";
        return engine::EnginePeer::Reply{delay, nlohmann::json{{"type", "decision"}, {"value", value}}.dump()};
    });

    bobproto::SimulatorConfig sim;
    sim.fps = o.fps;
    sim.frame_source = o.source.make(o.fps);
    const auto result = bobproto::simulate(sim, o.battery, peer, o.duration_s);

    if (!o.ui_dump.empty()) {
        std::ofstream out(o.ui_dump);
        if (!out)
            throw CliError(Exit::cant_create, "cannot write " + o.ui_dump.string());
        for (const auto& m : peer.ui_messages())
            out << m << "\n";
    }

    nlohmann::ordered_json j;
    j["frames"] = core.frames_seen();
    j["records"] = core.driver().log().size();
    j["outcomes"] = outcome_counts(core);
    j["consumed_mah"] = result.battery.consumed_mah;
    j["device_stopped"] = result.stopped;
    j["log"] = o.engine.log.string();
    std::cout << j.dump() << "\n";
}

} // namespace

void add_engine(CLI::App& app, Globals& g) {
    auto* eng = app.add_subcommand("engine", "Catch session engine");
    eng->require_subcommand(1);

    auto r = std::make_shared<RunOptions>();
    auto* run = eng->add_subcommand("run", "Connect to a bob over TCP and serve the UI over WebSocket");
    r->engine.add_to(run);
    run->add_option("--bob", r->bob, "Bob HOST:PORT")->required();
    run->add_option("--ui-listen", r->ui_listen, "WebSocket HOST:PORT for UI clients; port 0 picks one")
        ->capture_default_str();
    run->add_option("--duration", r->duration_s, "Stop after this many seconds")->check(CLI::PositiveNumber);
    run->add_option("--connect-timeout", r->connect_timeout_s, "Seconds to keep retrying the bob")
        ->capture_default_str();
    run->callback([r, &g] { run_engine_cmd(*r, g); });

    auto s = std::make_shared<SimulateOptions>();
    auto* sim = eng->add_subcommand("simulate", "Run engine and simulated bob together on a virtual clock");
    s->engine.add_to(sim);
    s->source.add_to(sim);
    sim->add_option("--fps", s->fps, "Frame rate")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--duration", s->duration_s, "Virtual seconds to run")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sim->add_option("--start", s->start, "Wall-clock time of virtual t = 0 (UTC, ISO 8601)")->capture_default_str();
    sim->add_option("--operator", s->op, "Scripted operator: follow, keep, release or none")
        ->capture_default_str()
        ->check(CLI::IsMember({"follow", "keep", "release", "none"}));
    sim->add_option("--operator-delay", s->op_delay_s, "Seconds the operator takes to answer")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sim->add_option("--ui-dump", s->ui_dump, "Write every UI bridge message as JSON lines");
    sim->add_option("--capacity-mah", s->battery.capacity_mah, "Bob battery capacity")->capture_default_str();
    sim->callback([s] { run_simulate(*s); });
}

} // namespace finsight::cli
