#pragma once

namespace finsight::bobproto {

/// Linear coulomb counter for the bob's cell. Draws are in mA; the streaming
/// figure is 400 mAh over a 3 h session. Idle and lure draws are fixture values.
struct BatteryModel {
    double capacity_mah = 2600.0;  // one 18650 cell
    double stream_draw_ma = 400.0 / 3.0;
    double idle_draw_ma = 20.0;
    double lure_draw_ma = 50.0;  // added on top while the lure is energized
    double consumed_mah = 0.0;

    /// Throws InvalidArgument on non-positive capacity/stream draw, negative
    /// idle/lure draw, or consumed outside [0, capacity].
    void validate() const;

    double draw_ma(bool streaming, bool lure_on) const noexcept;
    double remaining_mah() const noexcept { return capacity_mah - consumed_mah; }
    bool depleted() const noexcept { return consumed_mah >= capacity_mah; }

    /// Hours until depletion at the given draw; infinity for zero draw.
    double hours_to_depletion(double draw_ma) const noexcept;

    /// Integrates draw over `hours`, saturating at capacity.
    void drain(double draw_ma, double hours) noexcept;
};

} // namespace finsight::bobproto
