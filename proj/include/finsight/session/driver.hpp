#pragma once

#include "finsight/regulations/regulations.hpp"
#include "finsight/session/state_machine.hpp"

#include <optional>
#include <vector>

namespace finsight::session {

/// Runs step() against a clock: fires due deadlines as TIMEOUT events,
/// resolves EVALUATE effects against the regulation set and keeps the
/// in-memory catch log. Everything else in the effect list is left to the
/// caller to execute.
class SessionDriver {
public:
    SessionDriver(SessionConfig cfg, regulations::RegulationSet regs);

    /// Fires deadlines due at or before ev.at, then steps ev. Throws
    /// InvalidArgument if ev.at precedes an event already processed.
    std::vector<Effect> dispatch(const SessionEvent& ev);
    /// Fires deadlines due at or before now.
    std::vector<Effect> advance_to(Timestamp now);
    /// Fires the pending deadline regardless of time (input has ended).
    std::vector<Effect> flush_deadlines();

    std::optional<Timestamp> next_deadline() const;
    const SessionState& state() const noexcept { return state_; }
    const SessionConfig& config() const noexcept { return cfg_; }
    const regulations::RegulationSet& regulations() const noexcept { return regs_; }
    const std::vector<CatchRecord>& log() const noexcept { return log_; }
    /// Every event stepped so far, including injected timeouts and verdicts.
    const std::vector<SessionEvent>& history() const noexcept { return history_; }

private:
    void run(const SessionEvent& ev, std::vector<Effect>& out);
    void fire_due(Timestamp now, std::vector<Effect>& out);

    SessionConfig cfg_;
    regulations::RegulationSet regs_;
    SessionState state_;
    std::vector<CatchRecord> log_;
    std::vector<SessionEvent> history_;
    std::optional<Timestamp> last_;
};

} // namespace finsight::session
