#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace finsight::ems {

// Electrical and mechanical model of the stimulation lure's drive chain.
// Simulation only; nothing here is a statement about biological safety.

/// Published operating figures. The jaw resistance, 1 kHz drive and 5 V -> 492 V
/// step-up are measured/design values; max_current_a is a simulation guard.
struct ElectricalParams {
    double jaw_resistance_ohm = 21800.0;
    double drive_freq_hz = 1000.0;
    double primary_voltage_v = 5.0;
    double turns_ratio = 98.4;
    double max_current_a = 0.1;

    /// Throws InvalidArgument unless every field is strictly positive.
    void validate() const;
};

/// Current at which the Ohm's-law figure (436 V across the jaw) fits under the
/// 492 V secondary. The 90 mA calibration point needs 1962 V and fails the
/// voltage ceiling with default parameters.
inline constexpr double kDefaultLureCurrentA = 0.020;

struct CalibrationPoint {
    double current_a;
    double fish_mass_g;
    double tension_n;
};

/// Measured (current, fish mass) -> holding tension points. Within a mass group
/// currents are strictly increasing and tensions non-decreasing.
class TensionCalibration {
public:
    explicit TensionCalibration(std::vector<CalibrationPoint> points);

    /// The single published point: 90 mA on a 200 g perch holds 2 N.
    static TensionCalibration default_calibration();
    /// JSON list of [current_a, mass_g, tension_n] triples.
    static TensionCalibration from_json(const nlohmann::json& doc);
    static TensionCalibration load(const std::filesystem::path& path);

    const std::vector<CalibrationPoint>& points() const noexcept { return points_; }

private:
    std::vector<CalibrationPoint> points_;
};

struct LureState {
    bool active = false;
    double commanded_current_a = 0.0;
    double computed_voltage_v = 0.0;
};

/// V = I * R.
double required_voltage(double current_a, double resistance_ohm);

/// Ideal transformer: primary * turns ratio.
double secondary_voltage(const ElectricalParams& params);

/// Turns ratio that maps primary_v onto secondary_v.
double turns_ratio_for(double primary_v, double secondary_v);

/// Piecewise-linear in current through (0 A, 0 N) and the calibration points
/// of the nearest mass group (ties go to the lighter group). Clamped at the
/// largest calibrated current.
double holding_tension(double current_a, double fish_mass_g, const TensionCalibration& cal);

enum class Safety { ok, over_current, over_voltage };

const char* to_string(Safety s) noexcept;

/// Over-current is checked first; both bounds are inclusive.
Safety safety_check(double current_a, const ElectricalParams& params);

/// Lure state for a commanded current; throws InvalidArgument when unsafe.
LureState energize(double current_a, const ElectricalParams& params);

/// 50% duty square wave at drive_freq_hz with amplitude secondary_voltage,
/// round(duration * rate) samples starting high at t = 0.
std::vector<double> drive_waveform(const ElectricalParams& params, double duration_s, double sample_rate_hz);

/// Level changes across the trace, counting a change from `initial_level`
/// before the first sample.
int count_transitions(std::span<const double> samples, double initial_level = 0.0);

} // namespace finsight::ems
