#include "cli_common.hpp"

#include "finsight/ems/ems.hpp"

#include <iostream>
#include <optional>

namespace finsight::cli {

using namespace finsight::ems;

namespace {

void add_params(CLI::App* cmd, ElectricalParams& p) {
    cmd->add_option("--resistance", p.jaw_resistance_ohm, "Jaw resistance in ohms")->capture_default_str();
    cmd->add_option("--primary", p.primary_voltage_v, "Transformer primary voltage")->capture_default_str();
    cmd->add_option("--ratio", p.turns_ratio, "Transformer turns ratio")->capture_default_str();
    cmd->add_option("--max-current", p.max_current_a, "Current guard in amperes")->capture_default_str();
}

} // namespace

void add_ems(CLI::App& app, Globals& g) {
    auto* ems = app.add_subcommand("ems", "Stimulation lure electrical model");
    ems->require_subcommand(1);

    struct Calc {
        double current = kDefaultLureCurrentA;
        double resistance = 21800.0;
    };
    auto calc = std::make_shared<Calc>();
    auto* calc_cmd = ems->add_subcommand("calc", "Voltage needed to drive a current through the jaw (V = I R)");
    calc_cmd->add_option("--current", calc->current, "Current in amperes")->capture_default_str();
    calc_cmd->add_option("--resistance", calc->resistance, "Resistance in ohms")->capture_default_str();
    calc_cmd->callback([calc] {
        std::cout << format_number(required_voltage(calc->current, calc->resistance)) << " V\n";
    });

    struct Tension {
        double current = 0.090;
        double mass_g = 200.0;
        std::filesystem::path cal;
    };
    auto ten = std::make_shared<Tension>();
    auto* ten_cmd = ems->add_subcommand("tension", "Holding tension from the calibration table");
    ten_cmd->add_option("--current", ten->current, "Current in amperes")->capture_default_str();
    ten_cmd->add_option("--mass-g", ten->mass_g, "Fish mass in grams")->capture_default_str();
    ten_cmd->add_option("--cal", ten->cal, "Calibration JSON: [[current_a, mass_g, tension_n], ...]");
    ten_cmd->callback([ten] {
        TensionCalibration cal = TensionCalibration::default_calibration();
        if (!ten->cal.empty()) {
            require_input(ten->cal);
            cal = TensionCalibration::load(ten->cal);
        }
        std::cout << format_number(holding_tension(ten->current, ten->mass_g, cal)) << " N\n";
    });

    struct Transformer {
        ElectricalParams params;
        std::optional<double> secondary;
    };
    auto tr = std::make_shared<Transformer>();
    auto* tr_cmd = ems->add_subcommand(
        "transformer", "Secondary voltage of the step-up, or the ratio needed for --secondary");
    tr_cmd->add_option("--primary", tr->params.primary_voltage_v, "Primary voltage")->capture_default_str();
    tr_cmd->add_option("--ratio", tr->params.turns_ratio, "Turns ratio")->capture_default_str();
    tr_cmd->add_option("--secondary", tr->secondary, "Target secondary voltage; prints the turns ratio");
    tr_cmd->callback([tr] {
        if (tr->secondary)
            std::cout << format_number(turns_ratio_for(tr->params.primary_voltage_v, *tr->secondary)) << "\n";
        else
            std::cout << format_number(secondary_voltage(tr->params)) << " V\n";
    });

    struct Safe {
        ElectricalParams params;
        double current = kDefaultLureCurrentA;
    };
    auto sf = std::make_shared<Safe>();
    auto* sf_cmd = ems->add_subcommand("safety", "Check a commanded current against the limits. Exit 1 when unsafe");
    sf_cmd->add_option("--current", sf->current, "Current in amperes")->capture_default_str();
    add_params(sf_cmd, sf->params);
    sf_cmd->callback([sf, &g] {
        const Safety s = safety_check(sf->current, sf->params);
        std::cout << to_string(s) << " (" << format_number(required_voltage(sf->current, sf->params.jaw_resistance_ohm))
                  << " V needed, " << format_number(secondary_voltage(sf->params)) << " V available)\n";
        g.result = s == Safety::ok ? Exit::ok : Exit::result_release;
    });
}

} // namespace finsight::cli
