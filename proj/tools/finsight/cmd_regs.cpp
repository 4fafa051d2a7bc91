#include "cli_common.hpp"

#include "finsight/common/time.hpp"
#include "finsight/regulations/regulations.hpp"

#include <nlohmann/json.hpp>

#include <iostream>
#include <optional>

namespace finsight::cli {

using namespace finsight::regulations;

namespace {

struct CheckOptions {
    std::filesystem::path file;
    std::string species;
    std::optional<double> length_cm;
    std::string date;
    int bag = 0;
    bool json = false;
};

void run_check(const CheckOptions& o, Globals& g) {
    require_input(o.file);
    const RegulationSet regs = load_regulations(o.file);
    CatchContext ctx;
    ctx.species = o.species;
    ctx.length_cm = o.length_cm;
    ctx.date = parse_date(o.date);
    ctx.bag_count_today = o.bag;
    const Verdict v = evaluate(ctx, regs);

    if (o.json) {
        nlohmann::ordered_json j;
        j["decision"] = to_string(v.decision);
        j["reasons"] = nlohmann::ordered_json::array();
        for (Reason r : v.reasons)
            j["reasons"].push_back(to_string(r));
        std::cout << j.dump() << "\n";
    } else {
        std::cout << to_string(v.decision);
        for (Reason r : v.reasons)
            std::cout << ' ' << to_string(r);
        std::cout << "\n";
    }
    switch (v.decision) {
    case Decision::keep_allowed: g.result = Exit::ok; break;
    case Decision::must_release: g.result = Exit::result_release; break;
    case Decision::no_rule: g.result = Exit::result_no_rule; break;
    }
}

void run_validate(const std::filesystem::path& file) {
    require_input(file);
    const RegulationSet regs = load_regulations(file);
    std::cout << "ok: " << regs.rules().size() << " rules for " << regs.location() << "\n";
}

} // namespace

void add_regs(CLI::App& app, Globals& g) {
    auto* regs = app.add_subcommand("regs", "Fishing regulation lookups");
    regs->require_subcommand(1);

    auto o = std::make_shared<CheckOptions>();
    auto* check = regs->add_subcommand(
        "check", "Evaluate one catch. Exit 0 KEEP_ALLOWED, 1 MUST_RELEASE, 2 NO_RULE");
    check->add_option("--file", o->file, "Regulation JSON file")->required();
    check->add_option("--species", o->species, "Species name (case-insensitive)")->required();
    check->add_option("--length-cm", o->length_cm, "Measured length; omit when unknown")
        ->check(CLI::NonNegativeNumber);
    check->add_option("--date", o->date, "Catch date, YYYY-MM-DD (UTC)")->required();
    check->add_option("--bag", o->bag, "Fish of this species already kept today")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    check->add_flag("--json", o->json, "Print the verdict as JSON");
    check->callback([o, &g] { run_check(*o, g); });

    auto file = std::make_shared<std::filesystem::path>();
    auto* validate = regs->add_subcommand("validate", "Parse and validate a regulation file");
    validate->add_option("--file", *file, "Regulation JSON file")->required();
    validate->callback([file] { run_validate(*file); });
}

} // namespace finsight::cli
