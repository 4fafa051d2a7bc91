#include "finsight/ems/ems.hpp"

#include "finsight/common/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace finsight::ems {

void ElectricalParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidArgument(std::string("electrical parameter ") + name + " must be positive");
    };
    positive(jaw_resistance_ohm, "jaw_resistance_ohm");
    positive(drive_freq_hz, "drive_freq_hz");
    positive(primary_voltage_v, "primary_voltage_v");
    positive(turns_ratio, "turns_ratio");
    positive(max_current_a, "max_current_a");
}

TensionCalibration::TensionCalibration(std::vector<CalibrationPoint> points) : points_(std::move(points)) {
    if (points_.empty())
        throw InvalidArgument("tension calibration needs at least one point");
    std::map<double, const CalibrationPoint*> last_in_group;
    for (const auto& p : points_) {
        if (!(p.current_a > 0.0) || !(p.fish_mass_g > 0.0) || !(p.tension_n >= 0.0))
            throw InvalidArgument("calibration points need current > 0, mass > 0, tension >= 0");
        auto& prev = last_in_group[p.fish_mass_g];
        if (prev && !(p.current_a > prev->current_a))
            throw InvalidArgument("calibration currents must increase within a mass group");
        if (prev && p.tension_n < prev->tension_n)
            throw InvalidArgument("calibration tensions must not decrease with current");
        prev = &p;
    }
}

TensionCalibration TensionCalibration::default_calibration() {
    return TensionCalibration({{0.090, 200.0, 2.0}});
}

TensionCalibration TensionCalibration::from_json(const nlohmann::json& doc) {
    if (!doc.is_array())
        throw SchemaError("calibration", "expected a list of [current_a, mass_g, tension_n]");
    std::vector<CalibrationPoint> points;
    std::size_t i = 0;
    for (const auto& item : doc) {
        const std::string where = "calibration[" + std::to_string(i++) + "]";
        if (!item.is_array() || item.size() != 3 || !item[0].is_number() || !item[1].is_number() ||
            !item[2].is_number())
            throw SchemaError(where, "expected [current_a, mass_g, tension_n]");
        points.push_back({item[0].get<double>(), item[1].get<double>(), item[2].get<double>()});
    }
    try {
        return TensionCalibration(std::move(points));
    } catch (const InvalidArgument& e) {
        throw SchemaError("calibration", e.what());
    }
}

TensionCalibration TensionCalibration::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open calibration " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
}

double required_voltage(double current_a, double resistance_ohm) {
    if (!(resistance_ohm > 0.0))
        throw InvalidArgument("resistance must be positive");
    if (!(current_a >= 0.0))
        throw InvalidArgument("current must be non-negative");
    return current_a * resistance_ohm;
}

double secondary_voltage(const ElectricalParams& params) {
    params.validate();
    return params.primary_voltage_v * params.turns_ratio;
}

double turns_ratio_for(double primary_v, double secondary_v) {
    if (!(primary_v > 0.0) || !(secondary_v > 0.0))
        throw InvalidArgument("voltages must be positive");
    return secondary_v / primary_v;
}

double holding_tension(double current_a, double fish_mass_g, const TensionCalibration& cal) {
    if (!(current_a >= 0.0))
        throw InvalidArgument("current must be non-negative");
    if (!(fish_mass_g > 0.0))
        throw InvalidArgument("fish mass must be positive");

    double best_mass = cal.points().front().fish_mass_g;
    for (const auto& p : cal.points()) {
        const double d = std::abs(p.fish_mass_g - fish_mass_g);
        const double best = std::abs(best_mass - fish_mass_g);
        if (d < best || (d == best && p.fish_mass_g < best_mass))
            best_mass = p.fish_mass_g;
    }
    std::vector<CalibrationPoint> curve{{0.0, best_mass, 0.0}};
    for (const auto& p : cal.points())
        if (p.fish_mass_g == best_mass)
            curve.push_back(p);

    if (current_a >= curve.back().current_a)
        return curve.back().tension_n;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto& lo = curve[i - 1];
        const auto& hi = curve[i];
        if (current_a == hi.current_a)
            return hi.tension_n;
        if (current_a < hi.current_a) {
            const double t = (current_a - lo.current_a) / (hi.current_a - lo.current_a);
            return lo.tension_n + t * (hi.tension_n - lo.tension_n);
        }
    }
    return curve.back().tension_n;
}

const char* to_string(Safety s) noexcept {
    switch (s) {
    case Safety::ok: return "ok";
    case Safety::over_current: return "over-current";
    case Safety::over_voltage: return "over-voltage";
    }
    return "?";
}

Safety safety_check(double current_a, const ElectricalParams& params) {
    params.validate();
    if (current_a > params.max_current_a)
        return Safety::over_current;
    if (current_a > 0.0 && required_voltage(current_a, params.jaw_resistance_ohm) > secondary_voltage(params))
        return Safety::over_voltage;
    return Safety::ok;
}

LureState energize(double current_a, const ElectricalParams& params) {
    if (!(current_a >= 0.0))
        throw InvalidArgument("current must be non-negative");
    const Safety s = safety_check(current_a, params);
    if (s != Safety::ok)
        throw InvalidArgument(std::string("refusing to energize lure: ") + to_string(s));
    if (current_a == 0.0)
        return {};
    return {true, current_a, required_voltage(current_a, params.jaw_resistance_ohm)};
}

std::vector<double> drive_waveform(const ElectricalParams& params, double duration_s, double sample_rate_hz) {
    params.validate();
    if (!(duration_s >= 0.0))
        throw InvalidArgument("duration must be non-negative");
    if (!(sample_rate_hz >= 10.0 * params.drive_freq_hz))
        throw InvalidArgument("sample rate must be at least 10x the drive frequency");
    const double amplitude = secondary_voltage(params);
    const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Half-period index; a tiny bias keeps exact multiples on the right side of floor.
        const double half_periods = 2.0 * params.drive_freq_hz * static_cast<double>(i) / sample_rate_hz;
        const auto k = static_cast<long long>(std::floor(half_periods + 1e-9));
        out[i] = (k % 2 == 0) ? amplitude : 0.0;
    }
    return out;
}

int count_transitions(std::span<const double> samples, double initial_level) {
    int count = 0;
    double level = initial_level;
    for (double s : samples) {
        if (s != level)
            ++count;
        level = s;
    }
    return count;
}

} // namespace finsight::ems
