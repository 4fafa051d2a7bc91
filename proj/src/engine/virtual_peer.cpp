#include "finsight/engine/virtual_peer.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace finsight::engine {

EnginePeer::EnginePeer(EngineCore& core, Timestamp origin, Operator op)
    : core_(core), origin_(origin), op_(std::move(op)) {}

Timestamp EnginePeer::at(double t_s) const {
    return origin_ + std::chrono::milliseconds(std::llround(t_s * 1000.0));
}

double EnginePeer::to_s(Timestamp t) const {
    return std::chrono::duration<double>(t - origin_).count();
}

bobproto::Bytes EnginePeer::absorb(EngineCore::Output out, double t_s) {
    for (auto& msg : out.to_ui) {
        if (op_) {
            if (auto reply = op_(nlohmann::json::parse(msg)))
                inbox_.emplace(t_s + reply->delay_s, std::move(reply->text));
        }
        ui_.push_back(std::move(msg));
    }
    return std::move(out.to_bob);
}

bobproto::Bytes EnginePeer::on_receive(double t_s, std::span<const std::uint8_t> bytes) {
    return absorb(core_.on_bob_bytes(at(t_s), bytes), t_s);
}

std::optional<double> EnginePeer::next_wakeup() const {
    std::optional<double> t;
    if (!inbox_.empty())
        t = inbox_.begin()->first;
    if (const auto d = core_.next_deadline()) {
        const double s = to_s(*d);
        if (!t || s < *t)
            t = s;
    }
    return t;
}

bobproto::Bytes EnginePeer::on_wakeup(double t_s) {
    bobproto::Bytes to_bob = absorb(core_.on_tick(at(t_s)), t_s);
    while (!inbox_.empty() && inbox_.begin()->first <= t_s) {
        const std::string text = inbox_.begin()->second;
        inbox_.erase(inbox_.begin());
        auto out = core_.on_ui_text(at(t_s), text);
        const auto more = absorb(std::move(out), t_s);
        to_bob.insert(to_bob.end(), more.begin(), more.end());
    }
    return to_bob;
}

} // namespace finsight::engine
