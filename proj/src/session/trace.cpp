#include "finsight/session/trace.hpp"

#include "finsight/common/error.hpp"
#include "finsight/vision/detector.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace finsight::session {

namespace {

constexpr const char* kTraceTag = "finsight-session-trace";
constexpr int kTraceVersion = 1;

const nlohmann::json& need(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end())
        throw SchemaError(key, "missing");
    return *it;
}

std::uint32_t frame_id_of(const nlohmann::json& j) {
    const auto& v = need(j, "frame_id");
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 0xFFFFFFFFu)
        throw SchemaError("frame_id", "expected an unsigned 32-bit integer");
    return v.get<std::uint32_t>();
}

} // namespace

nlohmann::ordered_json event_to_json(const SessionEvent& ev) {
    nlohmann::ordered_json j;
    j["at"] = to_iso8601(ev.at);
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, FrameIn>) {
                j["event"] = "FRAME_IN";
                j["frame_id"] = e.frame_id;
                auto dets = nlohmann::ordered_json::array();
                for (const auto& d : e.detections) {
                    nlohmann::ordered_json o;
                    o["species"] = d.species;
                    o["confidence"] = d.confidence;
                    o["x"] = d.box.x;
                    o["y"] = d.box.y;
                    o["w"] = d.box.w;
                    o["h"] = d.box.h;
                    dets.push_back(std::move(o));
                }
                j["detections"] = std::move(dets);
            } else if constexpr (std::is_same_v<T, MeasureDone>) {
                j["event"] = "MEASURE_DONE";
                j["frame_id"] = e.frame_id;
                if (e.estimate) {
                    j["length_cm"] = e.estimate->length_cm;
                    j["depth_m"] = e.estimate->depth_used_m;
                    j["method"] = vision::to_string(e.estimate->method);
                } else {
                    j["length_cm"] = nullptr;
                }
            } else if constexpr (std::is_same_v<T, VerdictReady>) {
                j["event"] = "VERDICT";
                j["frame_id"] = e.frame_id;
                j["decision"] = regulations::to_string(e.verdict.decision);
            } else if constexpr (std::is_same_v<T, OperatorInput>) {
                j["event"] = "OPERATOR";
                j["choice"] = to_string(e.choice);
                if (e.frame_id)
                    j["frame_id"] = *e.frame_id;
            } else if constexpr (std::is_same_v<T, DeviceEvent>) {
                j["event"] = "DEVICE";
                j["signal"] = to_string(e.signal);
                j["seq"] = e.seq;
            } else if constexpr (std::is_same_v<T, TimeoutEvent>) {
                j["event"] = "TIMEOUT";
                j["kind"] = to_string(e.kind);
                j["frame_id"] = e.frame_id;
            }
        },
        ev.body);
    return j;
}

SessionEvent event_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw SchemaError("event", "expected an object");
    const auto& at = need(j, "at");
    if (!at.is_string())
        throw SchemaError("at", "expected an ISO-8601 string");
    SessionEvent ev;
    try {
        ev.at = parse_iso8601(at.get<std::string>());
    } catch (const ParseError& e) {
        throw SchemaError("at", e.what());
    }
    const auto& kind_j = need(j, "event");
    if (!kind_j.is_string())
        throw SchemaError("event", "expected a string");
    const std::string kind = kind_j.get<std::string>();
    try {
        if (kind == "FRAME_IN") {
            FrameIn f{frame_id_of(j), {}};
            const auto& dets = need(j, "detections");
            if (!dets.is_array())
                throw SchemaError("detections", "expected an array");
            for (const auto& d : dets)
                f.detections.push_back(vision::detection_from_json(d));
            ev.body = std::move(f);
        } else if (kind == "MEASURE_DONE") {
            MeasureDone m{frame_id_of(j), std::nullopt};
            const auto& len = need(j, "length_cm");
            if (!len.is_null()) {
                if (!len.is_number())
                    throw SchemaError("length_cm", "expected a number or null");
                vision::LengthEstimate est;
                est.length_cm = len.get<double>();
                est.depth_used_m = need(j, "depth_m").get<double>();
                est.method = vision::camera_model_from_string(need(j, "method").get<std::string>());
                m.estimate = est;
            }
            ev.body = m;
        } else if (kind == "OPERATOR") {
            OperatorInput o;
            o.choice = operator_choice_from_string(need(j, "choice").get<std::string>());
            if (j.contains("frame_id"))
                o.frame_id = frame_id_of(j);
            ev.body = o;
        } else if (kind == "DEVICE") {
            DeviceEvent d;
            d.signal = device_signal_from_string(need(j, "signal").get<std::string>());
            d.seq = need(j, "seq").get<std::uint32_t>();
            ev.body = d;
        } else if (kind == "TIMEOUT") {
            ev.body = TimeoutEvent{timeout_kind_from_string(need(j, "kind").get<std::string>()), frame_id_of(j)};
        } else if (kind == "VERDICT") {
            throw SchemaError("event", "VERDICT is recomputed on replay and must not be recorded");
        } else {
            throw SchemaError("event", "unknown event \"" + kind + "\"");
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(kind, e.what());
    } catch (const InvalidArgument& e) {
        throw SchemaError(kind, e.what());
    }
    return ev;
}

std::string trace_header_line(const SessionConfig& cfg, const regulations::RegulationSet& regs) {
    nlohmann::ordered_json h;
    h["trace"] = kTraceTag;
    h["version"] = kTraceVersion;
    h["config"] = {{"auto_release", cfg.auto_release},
                   {"measure_timeout_ms", cfg.measure_timeout.count()},
                   {"decision_timeout_ms", cfg.decision_timeout.count()}};
    h["regulations"] = nlohmann::ordered_json::parse(regulations::serialize_regulations(regs));
    return h.dump();
}

std::string trace_event_line(const SessionEvent& ev) {
    return event_to_json(ev).dump();
}

namespace {

void read_header(const nlohmann::json& h, Trace& t) {
    if (!h.is_object() || h.value("trace", "") != kTraceTag)
        throw SchemaError("trace", "first line is not a session trace header");
    if (h.value("version", 0) != kTraceVersion)
        throw SchemaError("version", "unsupported trace version");
    if (const auto it = h.find("config"); it != h.end()) {
        t.config.auto_release = it->value("auto_release", false);
        t.config.measure_timeout = std::chrono::milliseconds(it->value("measure_timeout_ms", 10'000));
        t.config.decision_timeout = std::chrono::milliseconds(it->value("decision_timeout_ms", 60'000));
        if (t.config.measure_timeout.count() <= 0 || t.config.decision_timeout.count() <= 0)
            throw SchemaError("config", "timeouts must be positive");
    }
    if (const auto it = h.find("regulations"); it != h.end())
        t.regulations = regulations::parse_regulations(it->dump());
}

} // namespace

Trace parse_trace(std::istream& in) {
    Trace t;
    std::string line;
    std::size_t line_no = 0;
    std::size_t offset = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t start = offset;
        offset += line.size() + 1;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("trace line " + std::to_string(line_no) + ": " + e.what(),
                             start + (e.byte > 0 ? e.byte - 1 : 0));
        }
        try {
            if (!header) {
                read_header(j, t);
                header = true;
            } else {
                t.events.push_back(event_from_json(j));
            }
        } catch (const SchemaError& e) {
            throw SchemaError("line " + std::to_string(line_no) + " " + e.field(), e.what());
        }
    }
    return t;
}

Trace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path.string());
    return parse_trace(in);
}

void write_trace(std::ostream& out, const Trace& t) {
    if (!t.regulations)
        throw InvalidArgument("a trace needs its regulation set to be written");
    out << trace_header_line(t.config, *t.regulations) << '\n';
    for (const auto& ev : t.events)
        out << trace_event_line(ev) << '\n';
}

ReplayResult replay(const Trace& t) {
    if (t.events.empty())
        return {};
    if (!t.regulations)
        throw SchemaError("regulations", "trace has events but no regulation set");
    SessionDriver driver(t.config, *t.regulations);
    ReplayResult r;
    for (const auto& ev : t.events) {
        auto fx = driver.dispatch(ev);
        r.effects.insert(r.effects.end(), fx.begin(), fx.end());
    }
    auto fx = driver.flush_deadlines();
    r.effects.insert(r.effects.end(), fx.begin(), fx.end());
    r.log = driver.log();
    r.final_state = driver.state();
    return r;
}

} // namespace finsight::session
