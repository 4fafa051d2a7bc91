#include "finsight/bobproto/battery.hpp"

#include "finsight/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace finsight::bobproto {

void BatteryModel::validate() const {
    if (!(capacity_mah > 0.0) || !std::isfinite(capacity_mah))
        throw InvalidArgument("battery capacity must be positive");
    if (!(stream_draw_ma > 0.0))
        throw InvalidArgument("stream draw must be positive");
    if (!(idle_draw_ma >= 0.0) || !(lure_draw_ma >= 0.0))
        throw InvalidArgument("idle and lure draws must be non-negative");
    if (!(consumed_mah >= 0.0) || consumed_mah > capacity_mah)
        throw InvalidArgument("consumed charge must lie within [0, capacity]");
}

double BatteryModel::draw_ma(bool streaming, bool lure_on) const noexcept {
    return (streaming ? stream_draw_ma : idle_draw_ma) + (lure_on ? lure_draw_ma : 0.0);
}

double BatteryModel::hours_to_depletion(double draw) const noexcept {
    if (draw <= 0.0)
        return std::numeric_limits<double>::infinity();
    return remaining_mah() / draw;
}

void BatteryModel::drain(double draw, double hours) noexcept {
    consumed_mah = std::min(capacity_mah, consumed_mah + draw * hours);
}

} // namespace finsight::bobproto
