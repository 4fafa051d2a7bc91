#include "finsight/session/driver.hpp"

#include "finsight/common/error.hpp"

#include <deque>

namespace finsight::session {

SessionDriver::SessionDriver(SessionConfig cfg, regulations::RegulationSet regs)
    : cfg_(cfg), regs_(std::move(regs)) {}

std::optional<Timestamp> SessionDriver::next_deadline() const {
    if (state_.deadline)
        return state_.deadline->at;
    return std::nullopt;
}

void SessionDriver::run(const SessionEvent& first, std::vector<Effect>& out) {
    std::deque<SessionEvent> queue{first};
    while (!queue.empty()) {
        const SessionEvent ev = std::move(queue.front());
        queue.pop_front();
        history_.push_back(ev);
        auto result = step(cfg_, state_, ev);
        state_ = std::move(result.state);
        for (auto& fx : result.effects) {
            if (const auto* e = std::get_if<Evaluate>(&fx))
                queue.push_back({ev.at, VerdictReady{e->frame_id, regulations::evaluate(e->context, regs_)}});
            else if (const auto* a = std::get_if<AppendLog>(&fx))
                log_.push_back(a->record);
            out.push_back(std::move(fx));
        }
    }
}

void SessionDriver::fire_due(Timestamp now, std::vector<Effect>& out) {
    while (state_.deadline && state_.deadline->at <= now) {
        const Deadline d = *state_.deadline;
        run({d.at, TimeoutEvent{d.kind, state_.current ? state_.current->frame_id : 0}}, out);
        last_ = d.at;
    }
}

std::vector<Effect> SessionDriver::dispatch(const SessionEvent& ev) {
    if (last_ && ev.at < *last_)
        throw InvalidArgument("event at " + to_iso8601(ev.at) + " precedes " + to_iso8601(*last_));
    std::vector<Effect> out;
    fire_due(ev.at, out);
    run(ev, out);
    last_ = ev.at;
    return out;
}

std::vector<Effect> SessionDriver::advance_to(Timestamp now) {
    std::vector<Effect> out;
    fire_due(now, out);
    return out;
}

std::vector<Effect> SessionDriver::flush_deadlines() {
    std::vector<Effect> out;
    while (state_.deadline)
        fire_due(state_.deadline->at, out);
    return out;
}

} // namespace finsight::session
