#include "finsight/session/state_machine.hpp"

#include "finsight/common/error.hpp"

#include <algorithm>

namespace finsight::session {

using regulations::Decision;
using regulations::Outcome;

const char* to_string(Phase p) noexcept {
    switch (p) {
    case Phase::idle: return "IDLE";
    case Phase::fish_present: return "FISH_PRESENT";
    case Phase::measured: return "MEASURED";
    case Phase::awaiting_decision: return "AWAITING_DECISION";
    case Phase::releasing: return "RELEASING";
    case Phase::landing: return "LANDING";
    }
    return "?";
}

const char* to_string(TimeoutKind k) noexcept {
    return k == TimeoutKind::measure ? "measure" : "decision";
}

const char* to_string(OperatorChoice c) noexcept {
    return c == OperatorChoice::keep ? "KEEP" : "RELEASE";
}

const char* to_string(DeviceSignal s) noexcept {
    switch (s) {
    case DeviceSignal::ack: return "ack";
    case DeviceSignal::nack: return "nack";
    case DeviceSignal::battery: return "battery";
    case DeviceSignal::bye: return "bye";
    }
    return "?";
}

namespace {

template <typename E, std::size_t N>
E from_table(std::string_view s, const E (&values)[N], const char* what) {
    for (E v : values)
        if (s == to_string(v))
            return v;
    throw InvalidArgument(std::string("unknown ") + what + " \"" + std::string(s) + "\"");
}

} // namespace

Phase phase_from_string(std::string_view s) {
    static const Phase all[] = {Phase::idle, Phase::fish_present, Phase::measured,
                                Phase::awaiting_decision, Phase::releasing, Phase::landing};
    return from_table(s, all, "phase");
}

TimeoutKind timeout_kind_from_string(std::string_view s) {
    static const TimeoutKind all[] = {TimeoutKind::measure, TimeoutKind::decision};
    return from_table(s, all, "timeout kind");
}

OperatorChoice operator_choice_from_string(std::string_view s) {
    static const OperatorChoice all[] = {OperatorChoice::keep, OperatorChoice::release};
    return from_table(s, all, "operator choice");
}

DeviceSignal device_signal_from_string(std::string_view s) {
    static const DeviceSignal all[] = {DeviceSignal::ack, DeviceSignal::nack, DeviceSignal::battery,
                                       DeviceSignal::bye};
    return from_table(s, all, "device signal");
}

const char* effect_name(const Effect& e) noexcept {
    static constexpr const char* names[] = {"REQUEST_DEPTH", "SEND_LURE_ON", "SEND_LURE_OFF", "APPEND_LOG",
                                            "EVALUATE",      "NOTIFY_UI",    "DIAGNOSTIC"};
    return names[e.index()];
}

namespace {

nlohmann::ordered_json verdict_json(const Verdict& v) {
    nlohmann::ordered_json reasons = nlohmann::ordered_json::array();
    for (auto r : v.reasons)
        reasons.push_back(regulations::to_string(r));
    return {{"decision", regulations::to_string(v.decision)}, {"reasons", reasons}};
}

nlohmann::ordered_json optional_length(const std::optional<double>& cm) {
    return cm ? nlohmann::ordered_json(*cm) : nlohmann::ordered_json(nullptr);
}

} // namespace

nlohmann::ordered_json effect_to_json(const Effect& e) {
    nlohmann::ordered_json j;
    j["effect"] = effect_name(e);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, RequestDepth>) {
                j["frame_id"] = v.frame_id;
                j["box"] = {v.detection.box.x, v.detection.box.y, v.detection.box.w, v.detection.box.h};
            } else if constexpr (std::is_same_v<T, AppendLog>) {
                j["record"] = regulations::record_to_json(v.record);
            } else if constexpr (std::is_same_v<T, Evaluate>) {
                j["frame_id"] = v.frame_id;
                j["species"] = v.context.species;
                j["length_cm"] = optional_length(v.context.length_cm);
                j["date"] = finsight::to_string(v.context.date);
                j["bag_count_today"] = v.context.bag_count_today;
            } else if constexpr (std::is_same_v<T, NotifyUi>) {
                j["payload"] = v.payload;
            } else if constexpr (std::is_same_v<T, Diagnostic>) {
                j["message"] = v.message;
            }
        },
        e);
    return j;
}

std::optional<std::string> invariant_violation(const SessionState& s) {
    switch (s.phase) {
    case Phase::idle:
        if (s.current)
            return "IDLE with a fish in progress";
        if (s.lure_on)
            return "IDLE with the lure on";
        if (s.deadline)
            return "IDLE with a pending deadline";
        return std::nullopt;
    case Phase::fish_present:
        if (!s.current)
            return "FISH_PRESENT without a detection";
        return std::nullopt;
    case Phase::measured:
        if (!s.current || !s.current->measured)
            return "MEASURED without a measurement";
        return std::nullopt;
    case Phase::awaiting_decision:
        if (!s.current || !s.current->verdict)
            return "AWAITING_DECISION without a verdict";
        return std::nullopt;
    case Phase::releasing:
    case Phase::landing:
        if (!s.current || !s.current->verdict)
            return std::string(to_string(s.phase)) + " without a verdict";
        if (s.phase == Phase::releasing && s.lure_on)
            return "RELEASING with the lure on";
        return std::nullopt;
    }
    return "unknown phase";
}

std::size_t select_primary(const std::vector<Detection>& dets) {
    if (dets.empty())
        throw InvalidArgument("select_primary needs at least one detection");
    auto better = [](const Detection& a, const Detection& b) {
        if (a.confidence != b.confidence)
            return a.confidence > b.confidence;
        if (a.box.area() != b.box.area())
            return a.box.area() > b.box.area();
        if (a.box.x != b.box.x)
            return a.box.x < b.box.x;
        return a.box.y < b.box.y;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < dets.size(); ++i)
        if (better(dets[i], dets[best]))
            best = i;
    return best;
}

namespace {

class Stepper {
public:
    Stepper(const SessionConfig& cfg, const SessionState& s, Timestamp at) : cfg_(cfg), s_(s), at_(at) {
        const CalendarDate today = utc_date(at);
        if (s_.bag_day != today) {
            s_.bag_counts.clear();
            s_.bag_day = today;
        }
    }

    StepResult finish() { return {std::move(s_), std::move(fx_)}; }

    void operator()(const FrameIn& e) {
        switch (s_.phase) {
        case Phase::idle:
            if (e.detections.empty())
                return;
            {
                const Detection& d = e.detections[select_primary(e.detections)];
                s_.current = Fish{e.frame_id, d, false, std::nullopt, std::nullopt};
                s_.phase = Phase::fish_present;
                s_.lure_on = true;
                s_.deadline = Deadline{TimeoutKind::measure, at_ + cfg_.measure_timeout};
                fx_.emplace_back(SendLureOn{});
                fx_.emplace_back(RequestDepth{e.frame_id, d});
            }
            return;
        case Phase::releasing:
        case Phase::landing:
            if (e.detections.empty())
                to_idle();
            return;
        default:
            return;  // one fish at a time; later frames do not restart the pipeline
        }
    }

    void operator()(const MeasureDone& e) {
        if (s_.phase != Phase::fish_present)
            return diag("MEASURE_DONE in " + std::string(to_string(s_.phase)));
        if (e.frame_id != s_.current->frame_id)
            return diag("MEASURE_DONE for frame " + std::to_string(e.frame_id) + " while measuring frame " +
                        std::to_string(s_.current->frame_id));
        s_.current->measured = true;
        s_.current->length = e.estimate;
        s_.phase = Phase::measured;
        regulations::CatchContext ctx;
        ctx.species = s_.current->detection.species;
        if (e.estimate)
            ctx.length_cm = e.estimate->length_cm;
        ctx.date = *s_.bag_day;
        ctx.bag_count_today = bag_count(ctx.species);
        fx_.emplace_back(Evaluate{e.frame_id, std::move(ctx)});
    }

    void operator()(const VerdictReady& e) {
        if (s_.phase != Phase::measured)
            return diag("VERDICT in " + std::string(to_string(s_.phase)));
        if (e.frame_id != s_.current->frame_id)
            return diag("VERDICT for frame " + std::to_string(e.frame_id));
        s_.current->verdict = e.verdict;
        s_.phase = Phase::awaiting_decision;
        s_.deadline = Deadline{TimeoutKind::decision, at_ + cfg_.decision_timeout};
        nlohmann::ordered_json p;
        p["type"] = "verdict";
        p["frame_id"] = e.frame_id;
        p["species"] = s_.current->detection.species;
        p["length_cm"] = optional_length(length_cm());
        p.update(verdict_json(e.verdict));
        p["auto_release"] = cfg_.auto_release && e.verdict.decision == Decision::must_release;
        fx_.emplace_back(NotifyUi{std::move(p)});
        if (cfg_.auto_release && e.verdict.decision == Decision::must_release)
            release();
    }

    void operator()(const OperatorInput& e) {
        if (s_.phase != Phase::awaiting_decision)
            return diag(std::string("OPERATOR ") + to_string(e.choice) + " in " + to_string(s_.phase));
        if (e.frame_id && *e.frame_id != s_.current->frame_id)
            return diag("OPERATOR decision for frame " + std::to_string(*e.frame_id) + " while deciding frame " +
                        std::to_string(s_.current->frame_id));
        if (e.choice == OperatorChoice::release)
            return release();
        const Verdict& v = *s_.current->verdict;
        if (v.decision != Decision::keep_allowed) {
            nlohmann::ordered_json p;
            p["type"] = "refusal";
            p["frame_id"] = s_.current->frame_id;
            p.update(verdict_json(v));
            p["message"] = std::string("keeping is refused: verdict is ") + regulations::to_string(v.decision);
            fx_.emplace_back(NotifyUi{std::move(p)});
            return;
        }
        append(Outcome::kept);
        ++s_.bag_counts[regulations::fold_species(s_.current->detection.species)];
        s_.phase = Phase::landing;
        s_.deadline.reset();
    }

    void operator()(const DeviceEvent& e) {
        if (e.signal != DeviceSignal::bye) {
            if (e.signal == DeviceSignal::nack)
                diag("device refused message seq " + std::to_string(e.seq));
            return;
        }
        if (s_.phase == Phase::fish_present || s_.phase == Phase::measured ||
            s_.phase == Phase::awaiting_decision)
            append(Outcome::lost);
        if (s_.phase != Phase::idle)
            to_idle();
    }

    void operator()(const TimeoutEvent& e) {
        const bool measuring = s_.phase == Phase::fish_present || s_.phase == Phase::measured;
        if (e.kind == TimeoutKind::measure && measuring && e.frame_id == s_.current->frame_id) {
            append(Outcome::lost);
            to_idle();
            return;
        }
        if (e.kind == TimeoutKind::decision && s_.phase == Phase::awaiting_decision &&
            e.frame_id == s_.current->frame_id)
            return release();
        diag(std::string("stale ") + to_string(e.kind) + " timeout in " + to_string(s_.phase));
    }

private:
    std::optional<double> length_cm() const {
        if (s_.current && s_.current->length)
            return s_.current->length->length_cm;
        return std::nullopt;
    }

    int bag_count(const std::string& species) const {
        const auto it = s_.bag_counts.find(regulations::fold_species(species));
        return it == s_.bag_counts.end() ? 0 : it->second;
    }

    void append(Outcome outcome) {
        CatchRecord r;
        r.timestamp = at_;
        r.species = s_.current->detection.species;
        r.length_cm = length_cm();
        r.verdict = s_.current->verdict;
        r.outcome = outcome;
        r.frame_id = s_.current->frame_id;
        fx_.emplace_back(AppendLog{std::move(r)});
    }

    void release() {
        lure_off();
        append(Outcome::released);
        s_.phase = Phase::releasing;
        s_.deadline.reset();
    }

    void lure_off() {
        if (s_.lure_on)
            fx_.emplace_back(SendLureOff{});
        s_.lure_on = false;
    }

    void to_idle() {
        lure_off();
        s_.phase = Phase::idle;
        s_.current.reset();
        s_.deadline.reset();
    }

    void diag(std::string msg) { fx_.emplace_back(Diagnostic{std::move(msg)}); }

    const SessionConfig& cfg_;
    SessionState s_;
    Timestamp at_;
    std::vector<Effect> fx_;
};

} // namespace

StepResult step(const SessionConfig& cfg, const SessionState& state, const SessionEvent& event) {
    Stepper s(cfg, state, event.at);
    std::visit(s, event.body);
    return s.finish();
}

} // namespace finsight::session
