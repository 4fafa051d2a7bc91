#include "finsight/regulations/regulations.hpp"

#include "finsight/common/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace finsight::regulations {

namespace {

using std::chrono::day;
using std::chrono::month;
using std::chrono::month_day;

unsigned ordinal(month_day md) {
    return static_cast<unsigned>(md.month()) * 100u + static_cast<unsigned>(md.day());
}

month_day parse_month_day(const nlohmann::json& value, const std::string& field) {
    if (!value.is_string())
        throw SchemaError(field, "expected a \"MM-DD\" string");
    const auto s = value.get<std::string>();
    if (s.size() != 5 || s[2] != '-' || !std::isdigit(static_cast<unsigned char>(s[0])) ||
        !std::isdigit(static_cast<unsigned char>(s[1])) || !std::isdigit(static_cast<unsigned char>(s[3])) ||
        !std::isdigit(static_cast<unsigned char>(s[4])))
        throw SchemaError(field, "expected \"MM-DD\", got \"" + s + "\"");
    const month_day md{month{static_cast<unsigned>(std::stoi(s.substr(0, 2)))},
                       day{static_cast<unsigned>(std::stoi(s.substr(3, 2)))}};
    if (!md.ok())
        throw SchemaError(field, "invalid month-day \"" + s + "\"");
    return md;
}

std::string format_month_day(month_day md) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02u-%02u", static_cast<unsigned>(md.month()), static_cast<unsigned>(md.day()));
    return buf;
}

double positive_length(const nlohmann::json& value, const std::string& field, double scale) {
    if (!value.is_number())
        throw SchemaError(field, "expected a number");
    const double v = value.get<double>();
    if (!(v > 0.0) || !std::isfinite(v))
        throw SchemaError(field, "must be a positive length");
    return v * scale;
}

Rule parse_rule(const nlohmann::json& j, const std::string& where, double scale) {
    if (!j.is_object())
        throw SchemaError(where, "expected an object");
    static const std::set<std::string> known{"species", "min_length", "max_length", "bag_limit", "season"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw SchemaError(where + "." + key, "unknown field");

    Rule rule;
    if (!j.contains("species") || !j.at("species").is_string() || j.at("species").get<std::string>().empty())
        throw SchemaError(where + ".species", "required non-empty string");
    rule.species = fold_species(j.at("species").get<std::string>());
    const std::string named = where + " (" + rule.species + ")";

    if (j.contains("min_length"))
        rule.min_length_cm = positive_length(j.at("min_length"), named + ".min_length", scale);
    if (j.contains("max_length"))
        rule.max_length_cm = positive_length(j.at("max_length"), named + ".max_length", scale);
    if (rule.min_length_cm && rule.max_length_cm && !(*rule.min_length_cm < *rule.max_length_cm))
        throw SchemaError(named + ".min_length", "min_length must be below max_length for species " + rule.species);
    if (j.contains("bag_limit")) {
        const auto& b = j.at("bag_limit");
        if (!b.is_number_integer() || b.get<long long>() < 0 || b.get<long long>() > 1000000)
            throw SchemaError(named + ".bag_limit", "expected a non-negative integer");
        rule.bag_limit = static_cast<int>(b.get<long long>());
    }
    if (j.contains("season")) {
        const auto& s = j.at("season");
        if (!s.is_object() || !s.contains("open") || !s.contains("close"))
            throw SchemaError(named + ".season", "expected {\"open\": \"MM-DD\", \"close\": \"MM-DD\"}");
        rule.season = Season{parse_month_day(s.at("open"), named + ".season.open"),
                             parse_month_day(s.at("close"), named + ".season.close")};
    }
    return rule;
}

} // namespace

bool Season::contains(month_day md) const noexcept {
    const unsigned d = ordinal(md), o = ordinal(open), c = ordinal(close);
    if (o <= c)
        return d >= o && d <= c;
    return d >= o || d <= c;
}

std::string fold_species(std::string_view species) {
    std::string out(species);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

RegulationSet::RegulationSet(std::string location, std::vector<Rule> rules)
    : location_(std::move(location)), rules_(std::move(rules)) {
    if (location_.empty())
        throw SchemaError("location", "must be non-empty");
    std::set<std::string> seen;
    for (auto& r : rules_) {
        r.species = fold_species(r.species);
        if (!seen.insert(r.species).second)
            throw SchemaError("rules", "duplicate rule for species " + r.species);
    }
}

const Rule* RegulationSet::find(std::string_view species) const {
    const auto key = fold_species(species);
    for (const auto& r : rules_)
        if (r.species == key)
            return &r;
    return nullptr;
}

const char* to_string(Decision d) noexcept {
    switch (d) {
    case Decision::keep_allowed: return "KEEP_ALLOWED";
    case Decision::must_release: return "MUST_RELEASE";
    case Decision::no_rule: return "NO_RULE";
    }
    return "?";
}

const char* to_string(Reason r) noexcept {
    switch (r) {
    case Reason::undersize: return "UNDERSIZE";
    case Reason::oversize: return "OVERSIZE";
    case Reason::out_of_season: return "OUT_OF_SEASON";
    case Reason::bag_limit_reached: return "BAG_LIMIT_REACHED";
    case Reason::length_unknown: return "LENGTH_UNKNOWN";
    }
    return "?";
}

Decision decision_from_string(std::string_view s) {
    for (auto d : {Decision::keep_allowed, Decision::must_release, Decision::no_rule})
        if (s == to_string(d))
            return d;
    throw SchemaError("decision", "unknown decision \"" + std::string(s) + "\"");
}

Reason reason_from_string(std::string_view s) {
    for (auto r : {Reason::undersize, Reason::oversize, Reason::out_of_season, Reason::bag_limit_reached,
                   Reason::length_unknown})
        if (s == to_string(r))
            return r;
    throw SchemaError("reasons", "unknown reason code \"" + std::string(s) + "\"");
}

RegulationSet parse_regulations(std::string_view doc) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(doc.begin(), doc.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("regulation syntax error: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
    if (!j.is_object())
        throw SchemaError("$", "expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "location" && key != "units" && key != "rules")
            throw SchemaError(key, "unknown field");
    if (!j.contains("location") || !j.at("location").is_string())
        throw SchemaError("location", "required string");

    double scale = 1.0;
    if (j.contains("units")) {
        const auto& u = j.at("units");
        if (u == "in")
            scale = 2.54;
        else if (u != "cm")
            throw SchemaError("units", "must be \"cm\" or \"in\"");
    }
    if (!j.contains("rules") || !j.at("rules").is_array())
        throw SchemaError("rules", "required array");

    std::vector<Rule> rules;
    std::set<std::string> seen;
    std::size_t i = 0;
    for (const auto& item : j.at("rules")) {
        const std::string where = "rules[" + std::to_string(i++) + "]";
        Rule r = parse_rule(item, where, scale);
        if (!seen.insert(r.species).second)
            throw SchemaError(where + ".species", "duplicate rule for species " + r.species);
        rules.push_back(std::move(r));
    }
    return RegulationSet(j.at("location").get<std::string>(), std::move(rules));
}

RegulationSet load_regulations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open regulations " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_regulations(buf.str());
}

std::string serialize_regulations(const RegulationSet& regs) {
    nlohmann::ordered_json rules = nlohmann::ordered_json::array();
    for (const auto& r : regs.rules()) {
        nlohmann::ordered_json jr;
        jr["species"] = r.species;
        if (r.min_length_cm)
            jr["min_length"] = *r.min_length_cm;
        if (r.max_length_cm)
            jr["max_length"] = *r.max_length_cm;
        if (r.bag_limit)
            jr["bag_limit"] = *r.bag_limit;
        if (r.season)
            jr["season"] = {{"open", format_month_day(r.season->open)}, {"close", format_month_day(r.season->close)}};
        rules.push_back(std::move(jr));
    }
    nlohmann::ordered_json doc;
    doc["location"] = regs.location();
    doc["units"] = "cm";
    doc["rules"] = std::move(rules);
    return doc.dump(2);
}

Verdict evaluate(const CatchContext& ctx, const RegulationSet& regs) {
    const Rule* rule = regs.find(ctx.species);
    if (!rule)
        return {Decision::no_rule, {}};

    Verdict v;
    if (ctx.length_cm) {
        if (rule->min_length_cm && *ctx.length_cm < *rule->min_length_cm)
            v.reasons.push_back(Reason::undersize);
        if (rule->max_length_cm && *ctx.length_cm > *rule->max_length_cm)
            v.reasons.push_back(Reason::oversize);
    }
    if (rule->season && !rule->season->contains(month_day{ctx.date.month(), ctx.date.day()}))
        v.reasons.push_back(Reason::out_of_season);
    if (rule->bag_limit && ctx.bag_count_today >= *rule->bag_limit)
        v.reasons.push_back(Reason::bag_limit_reached);
    if (!ctx.length_cm && rule->has_length_constraint())
        v.reasons.push_back(Reason::length_unknown);
    v.decision = v.reasons.empty() ? Decision::keep_allowed : Decision::must_release;
    return v;
}

} // namespace finsight::regulations
