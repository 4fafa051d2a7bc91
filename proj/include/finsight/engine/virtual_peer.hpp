#pragma once

#include "finsight/bobproto/simulator.hpp"
#include "finsight/engine/engine_core.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace finsight::engine {

/// Runs an EngineCore as the bob's peer on the virtual clock. Virtual
/// second t maps to `origin + t`. An optional operator script sees every UI
/// message and may answer with a UI text after a delay.
class EnginePeer final : public bobproto::VirtualPeer {
public:
    struct Reply {
        double delay_s;
        std::string text;
    };
    using Operator = std::function<std::optional<Reply>(const nlohmann::json& ui_message)>;

    EnginePeer(EngineCore& core, Timestamp origin, Operator op = {});

    bobproto::Bytes on_receive(double t_s, std::span<const std::uint8_t> bytes) override;
    std::optional<double> next_wakeup() const override;
    bobproto::Bytes on_wakeup(double t_s) override;

    /// Every UI message the engine broadcast, in order.
    const std::vector<std::string>& ui_messages() const noexcept { return ui_; }

private:
    bobproto::Bytes absorb(EngineCore::Output out, double t_s);
    double to_s(Timestamp t) const;
    Timestamp at(double t_s) const;

    EngineCore& core_;
    Timestamp origin_;
    Operator op_;
    std::multimap<double, std::string> inbox_;
    std::vector<std::string> ui_;
};

} // namespace finsight::engine
