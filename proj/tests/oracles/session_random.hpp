#pragma once

#include "finsight/session/state_machine.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace oracle {

using namespace finsight::session;
using finsight::vision::Detection;
using finsight::vision::LengthEstimate;

/// One plausible-but-adversarial event after `t` seconds (advanced in place)
/// past `origin`. Frame ids come from `next_id`; measurements and timeouts
/// usually target the current fish.
inline SessionEvent random_event(std::mt19937_64& rng, double& t, const SessionState& s, std::uint32_t& next_id,
                                 finsight::Timestamp origin) {
    std::uniform_real_distribution<double> gap(0.0, 15.0);
    t += gap(rng);
    // Occasionally jump close to a UTC midnight so bag days roll over (the jump
    // assumes an origin at 06:00 UTC).
    if (rng() % 200 == 0)
        t += 86400.0 - std::fmod(t + 6 * 3600.0, 86400.0) - 1.0;
    const finsight::Timestamp when = origin + std::chrono::milliseconds(static_cast<long long>(t * 1000.0));
    const char* species[] = {"bass", "Bass", "cod", "pike"};
    const std::uint32_t cur = s.current ? s.current->frame_id : next_id;
    switch (rng() % 10) {
    case 0:
    case 1:
    case 2:
    case 3: {
        std::vector<Detection> dets;
        const int n = static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i)
            dets.push_back(Detection{species[rng() % 4], (rng() % 100) / 100.0,
                                     {static_cast<int>(rng() % 50), static_cast<int>(rng() % 50),
                                      1 + static_cast<int>(rng() % 30), 1 + static_cast<int>(rng() % 30)}});
        return {when, FrameIn{next_id++, dets}};
    }
    case 4:
    case 5: {
        std::optional<LengthEstimate> est;
        if (rng() % 5 != 0)
            est = LengthEstimate{10.0 + static_cast<double>(rng() % 80), 1.0, finsight::vision::CameraModel::pinhole};
        return {when, MeasureDone{rng() % 5 == 0 ? cur + 1 : cur, est}};
    }
    case 6:
    case 7:
        return {when, OperatorInput{rng() % 2 ? OperatorChoice::keep : OperatorChoice::release, std::nullopt}};
    case 8:
        return {when, DeviceEvent{static_cast<DeviceSignal>(rng() % 4), static_cast<std::uint32_t>(rng() % 100)}};
    default:
        return {when, TimeoutEvent{rng() % 2 ? TimeoutKind::measure : TimeoutKind::decision, cur}};
    }
}

} // namespace oracle
