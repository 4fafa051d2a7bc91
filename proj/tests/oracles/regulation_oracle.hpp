#pragma once

// Predicate-by-predicate reference for regulation verdicts, plus the boundary
// grid both the unit and acceptance suites sweep. Season membership is decided
// by walking the calendar day by day rather than by comparing ordinals.

#include "finsight/regulations/regulations.hpp"

#include <chrono>
#include <string>
#include <vector>

namespace oracle {

namespace regs = finsight::regulations;

inline bool season_walk_contains(const regs::Season& s, std::chrono::month_day target) {
    using namespace std::chrono;
    // 2024 is a leap year, so every valid month-day exists in it.
    sys_days d{year{2024} / s.open.month() / s.open.day()};
    for (int steps = 0; steps < 367; ++steps) {
        const year_month_day ymd{d};
        const month_day md{ymd.month(), ymd.day()};
        if (md == target)
            return true;
        if (md == s.close)
            return false;
        d += days{1};
    }
    return false;
}

inline regs::Verdict expected_verdict(const regs::CatchContext& ctx, const regs::RegulationSet& set) {
    regs::Verdict v;
    const regs::Rule* rule = nullptr;
    for (const auto& r : set.rules())
        if (regs::fold_species(r.species) == regs::fold_species(ctx.species))
            rule = &r;
    if (rule == nullptr) {
        v.decision = regs::Decision::no_rule;
        return v;
    }
    const bool has_len = ctx.length_cm.has_value();
    const bool under = has_len && rule->min_length_cm.has_value() && *ctx.length_cm < *rule->min_length_cm;
    const bool over = has_len && rule->max_length_cm.has_value() && *ctx.length_cm > *rule->max_length_cm;
    const bool out_of_season =
        rule->season.has_value() &&
        !season_walk_contains(*rule->season, std::chrono::month_day{ctx.date.month(), ctx.date.day()});
    const bool bag_full = rule->bag_limit.has_value() && ctx.bag_count_today >= *rule->bag_limit;
    const bool unknown = !has_len && (rule->min_length_cm.has_value() || rule->max_length_cm.has_value());
    if (under)
        v.reasons.push_back(regs::Reason::undersize);
    if (over)
        v.reasons.push_back(regs::Reason::oversize);
    if (out_of_season)
        v.reasons.push_back(regs::Reason::out_of_season);
    if (bag_full)
        v.reasons.push_back(regs::Reason::bag_limit_reached);
    if (unknown)
        v.reasons.push_back(regs::Reason::length_unknown);
    v.decision = v.reasons.empty() ? regs::Decision::keep_allowed : regs::Decision::must_release;
    return v;
}

struct GridCase {
    regs::CatchContext ctx;
};

inline regs::RegulationSet grid_regulations() {
    using namespace std::chrono;
    return regs::RegulationSet(
        "fixture-grid",
        {
            {"slot_bass", 50.0, 70.0, 2, regs::Season{May / 1, October / 31}},
            {"winter_trout", 30.0, std::nullopt, 3, regs::Season{November / 1, February / 28}},
            {"min_only", 25.0, std::nullopt, std::nullopt, std::nullopt},
            {"no_take", std::nullopt, std::nullopt, 0, std::nullopt},
            {"leap_pike", std::nullopt, 90.0, 1, regs::Season{February / 29, March / 1}},
        });
}

/// Lengths below/at/above each bound plus "unknown", dates inside, outside and
/// on each season boundary, bag counts below/at/above the limit.
inline std::vector<regs::CatchContext> boundary_grid() {
    using namespace std::chrono;
    std::vector<regs::CatchContext> out;
    const std::vector<std::string> species{"slot_bass", "Winter_Trout", "min_only", "no_take", "leap_pike", "carp"};
    const std::vector<std::optional<double>> lengths{std::nullopt, 10.0, 24.99, 25.0, 29.9, 30.0,
                                                     49.99, 50.0,  60.0,  70.0, 70.01, 90.0, 95.0};
    const std::vector<year_month_day> dates{
        2023y / April / 30, 2023y / May / 1,     2023y / July / 4,     2023y / October / 31,
        2023y / November / 1, 2023y / December / 25, 2024y / January / 15, 2024y / February / 28,
        2024y / February / 29, 2024y / March / 1, 2024y / March / 2,  2023y / June / 1};
    const std::vector<int> bags{0, 1, 2, 3};
    for (const auto& s : species)
        for (const auto& len : lengths)
            for (const auto& d : dates)
                for (int bag : bags)
                    out.push_back({s, len, d, bag});
    return out;
}

} // namespace oracle
