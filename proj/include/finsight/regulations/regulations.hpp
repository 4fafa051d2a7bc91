#pragma once

#include "finsight/common/time.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace finsight::regulations {

/// Open season, both endpoints inclusive. When close precedes open the season
/// wraps across the new year.
struct Season {
    std::chrono::month_day open;
    std::chrono::month_day close;

    bool contains(std::chrono::month_day day) const noexcept;
    bool operator==(const Season&) const = default;
};

/// Lengths are centimetres. A catch exactly at min_length_cm is legal.
struct Rule {
    std::string species;
    std::optional<double> min_length_cm;
    std::optional<double> max_length_cm;
    std::optional<int> bag_limit;
    std::optional<Season> season;

    bool has_length_constraint() const noexcept { return min_length_cm || max_length_cm; }
    bool operator==(const Rule&) const = default;
};

/// Rules for one location; at most one rule per (case-folded) species key.
class RegulationSet {
public:
    RegulationSet(std::string location, std::vector<Rule> rules);

    const std::string& location() const noexcept { return location_; }
    const std::vector<Rule>& rules() const noexcept { return rules_; }
    /// Case-insensitive lookup; nullptr when the species has no rule.
    const Rule* find(std::string_view species) const;

    bool operator==(const RegulationSet&) const = default;

private:
    std::string location_;
    std::vector<Rule> rules_;
};

/// Lower-cases ASCII letters; species keys are compared in this form.
std::string fold_species(std::string_view species);

enum class Decision { keep_allowed, must_release, no_rule };
enum class Reason { undersize, oversize, out_of_season, bag_limit_reached, length_unknown };

const char* to_string(Decision d) noexcept;
const char* to_string(Reason r) noexcept;
Decision decision_from_string(std::string_view s);
Reason reason_from_string(std::string_view s);

struct Verdict {
    Decision decision = Decision::no_rule;
    /// Ordered as the Reason enumerators.
    std::vector<Reason> reasons;

    bool operator==(const Verdict&) const = default;
};

struct CatchContext {
    std::string species;
    std::optional<double> length_cm;
    CalendarDate date;
    /// Fish of this species already kept today.
    int bag_count_today = 0;
};

/// Parses the JSON regulation document. Throws ParseError with a byte offset
/// for malformed JSON and SchemaError naming the field for content problems.
RegulationSet parse_regulations(std::string_view doc);
RegulationSet load_regulations(const std::filesystem::path& path);

/// Canonical JSON form (units always "cm"); parse(serialize(r)) == r.
std::string serialize_regulations(const RegulationSet& regs);

Verdict evaluate(const CatchContext& ctx, const RegulationSet& regs);

} // namespace finsight::regulations
