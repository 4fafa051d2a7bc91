#include "finsight/common/error.hpp"
#include "finsight/ems/ems.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <random>

using namespace finsight::ems;

TEST_CASE("required voltage is Ohm's law") {
    CHECK(required_voltage(0.020, 21800.0) == 436.0);
    CHECK(required_voltage(0.0, 123.0) == 0.0);
    // 90 mA across the same jaw needs 1962 V, far above the 492 V supply.
    CHECK(required_voltage(0.090, 21800.0) == doctest::Approx(1962.0).epsilon(1e-12));
    CHECK_THROWS_AS(required_voltage(0.01, 0.0), finsight::InvalidArgument);
    CHECK_THROWS_AS(required_voltage(0.01, -5.0), finsight::InvalidArgument);
    CHECK_THROWS_AS(required_voltage(-0.01, 5.0), finsight::InvalidArgument);
}

TEST_CASE("required voltage is linear in current") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> cur(0.0, 1.0), res(1.0, 1e5), alpha(0.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double c = cur(rng), r = res(rng), a = alpha(rng);
        CHECK(required_voltage(a * c, r) == doctest::Approx(a * required_voltage(c, r)).epsilon(1e-14));
    }
    CHECK(required_voltage(2 * 0.020, 21800.0) == 2 * required_voltage(0.020, 21800.0));
}

TEST_CASE("secondary voltage of the ideal transformer") {
    ElectricalParams p;
    CHECK(std::abs(secondary_voltage(p) - 492.0) <= 1e-9);
    CHECK(turns_ratio_for(5.0, 492.0) == doctest::Approx(98.4));
    p.turns_ratio = 1.0;
    p.primary_voltage_v = 7.25;
    CHECK(secondary_voltage(p) == 7.25);
    p.primary_voltage_v = 3.7;
    p.turns_ratio = 98.4;
    CHECK(std::abs(secondary_voltage(p) - 364.08) <= 1e-9);

    // Ratio from endpoints reproduces the secondary.
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> v(0.5, 1000.0);
    for (int i = 0; i < 200; ++i) {
        ElectricalParams q;
        q.primary_voltage_v = v(rng);
        const double target = v(rng);
        q.turns_ratio = turns_ratio_for(q.primary_voltage_v, target);
        CHECK(secondary_voltage(q) == doctest::Approx(target).epsilon(1e-14));
    }
    p.turns_ratio = 0.0;
    CHECK_THROWS_AS(secondary_voltage(p), finsight::InvalidArgument);
}

TEST_CASE("holding tension on the default calibration") {
    const auto cal = TensionCalibration::default_calibration();
    CHECK(holding_tension(0.090, 200.0, cal) == 2.0);
    CHECK(holding_tension(0.0, 200.0, cal) == 0.0);
    CHECK(holding_tension(0.0, 5000.0, cal) == 0.0);
    CHECK(holding_tension(0.045, 200.0, cal) == doctest::Approx(1.0).epsilon(1e-15));
    // Clamped above the calibrated range.
    CHECK(holding_tension(0.5, 200.0, cal) == 2.0);
}

TEST_CASE("holding tension picks the nearest mass group") {
    const TensionCalibration cal({{0.05, 100, 0.5}, {0.10, 100, 1.5}, {0.05, 400, 1.0}, {0.10, 400, 3.0}});
    CHECK(holding_tension(0.10, 120, cal) == 1.5);
    CHECK(holding_tension(0.10, 390, cal) == 3.0);
    CHECK(holding_tension(0.10, 250, cal) == 1.5);  // tie -> lighter group
    CHECK(holding_tension(0.075, 400, cal) == doctest::Approx(2.0));
    CHECK(holding_tension(0.025, 100, cal) == doctest::Approx(0.25));
}

TEST_CASE("calibration validation") {
    CHECK_THROWS_AS(TensionCalibration({}), finsight::InvalidArgument);
    CHECK_THROWS_AS(TensionCalibration({{0.1, 200, 2}, {0.05, 200, 3}}), finsight::InvalidArgument);
    CHECK_THROWS_AS(TensionCalibration({{0.05, 200, 2}, {0.1, 200, 1}}), finsight::InvalidArgument);
    CHECK_THROWS_AS(TensionCalibration({{0.0, 200, 2}}), finsight::InvalidArgument);
    CHECK_THROWS_AS(TensionCalibration({{0.1, 200, -1}}), finsight::InvalidArgument);
    CHECK_NOTHROW(TensionCalibration::from_json(nlohmann::json::parse("[[0.09, 200, 2.0], [0.12, 200, 2.4]]")));
    CHECK_THROWS_AS(TensionCalibration::from_json(nlohmann::json::parse("[[0.09, 200]]")), finsight::SchemaError);
    CHECK_THROWS_AS(TensionCalibration::from_json(nlohmann::json::parse("{}")), finsight::SchemaError);
    CHECK_THROWS_AS(TensionCalibration::from_json(nlohmann::json::parse("[[0.09, 200, 2.0], [0.05, 200, 2.4]]")),
                    finsight::SchemaError);
}

TEST_CASE("holding tension properties over random calibrations") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> step(0.001, 0.05), gain(0.0, 2.0), mass(50, 2000), probe(0.0, 0.6);
    std::uniform_int_distribution<int> groups(1, 3), per(1, 5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<CalibrationPoint> pts;
        const int g = groups(rng);
        for (int k = 0; k < g; ++k) {
            const double m = std::round(mass(rng));
            double c = 0.0, t = 0.0;
            for (int i = 0; i < per(rng); ++i) {
                c += step(rng);
                t += gain(rng);
                pts.push_back({c, m, t});
            }
        }
        TensionCalibration cal(pts);
        for (const auto& p : pts)
            CHECK(holding_tension(p.current_a, p.fish_mass_g, cal) == doctest::Approx(p.tension_n).epsilon(1e-12));
        const double m = pts.front().fish_mass_g;
        std::vector<double> currents(50);
        for (auto& c : currents)
            c = probe(rng);
        std::sort(currents.begin(), currents.end());
        double last = -1.0;
        for (double c : currents) {
            const double t = holding_tension(c, m, cal);
            CHECK(t >= last);
            last = t;
        }
    }
}

TEST_CASE("safety check") {
    ElectricalParams low_r;
    low_r.jaw_resistance_ohm = 1000.0;  // voltage ceiling not binding below 0.492 A
    CHECK(safety_check(0.0, low_r) == Safety::ok);
    CHECK(safety_check(low_r.max_current_a, low_r) == Safety::ok);
    CHECK(safety_check(1.5 * low_r.max_current_a, low_r) == Safety::over_current);

    const ElectricalParams published;
    CHECK(safety_check(0.0, published) == Safety::ok);
    CHECK(safety_check(kDefaultLureCurrentA, published) == Safety::ok);
    CHECK(safety_check(0.090, published) == Safety::over_voltage);

    // Monotone: once ok, every smaller current is ok.
    for (const auto& p : {low_r, published}) {
        bool seen_violation = false;
        for (double c = 0.0; c <= 0.2; c += 0.0005) {
            const bool ok = safety_check(c, p) == Safety::ok;
            if (seen_violation)
                CHECK_FALSE(ok);
            seen_violation = seen_violation || !ok;
        }
    }
}

TEST_CASE("energize") {
    const ElectricalParams p;
    const auto s = energize(kDefaultLureCurrentA, p);
    CHECK(s.active);
    CHECK(s.computed_voltage_v == 436.0);
    const auto off = energize(0.0, p);
    CHECK_FALSE(off.active);
    CHECK(off.commanded_current_a == 0.0);
    CHECK_THROWS_AS(energize(0.09, p), finsight::InvalidArgument);
}

TEST_CASE("drive waveform") {
    const ElectricalParams p;
    const auto one_ms = drive_waveform(p, 0.001, 10000.0);
    REQUIRE(one_ms.size() == 10);
    for (int i = 0; i < 10; ++i)
        CHECK(one_ms[static_cast<std::size_t>(i)] == (i < 5 ? secondary_voltage(p) : 0.0));
    double sum = 0;
    for (double v : one_ms)
        sum += v;
    CHECK(sum / 10.0 == doctest::Approx(secondary_voltage(p) / 2.0));

    const auto trace = drive_waveform(p, 0.1, 48000.0);
    CHECK(trace.size() == 4800);
    CHECK(count_transitions(trace) == 200);

    CHECK_THROWS_AS(drive_waveform(p, 0.01, 9999.0), finsight::InvalidArgument);
    CHECK(drive_waveform(p, 0.0, 10000.0).empty());
}
