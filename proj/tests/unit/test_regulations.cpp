#include "finsight/common/error.hpp"
#include "finsight/regulations/catch_record.hpp"
#include "finsight/regulations/regulations.hpp"
#include "oracles/regulation_oracle.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <random>

using namespace finsight;
using namespace finsight::regulations;
using namespace std::chrono;

namespace {

RegulationSet one_rule(Rule r) { return RegulationSet("test-lake", {std::move(r)}); }

CatchContext ctx(std::string species, std::optional<double> len, year_month_day date, int bag) {
    return {std::move(species), len, date, bag};
}

CatchRecord record(std::string ts, std::string species, Outcome outcome, Decision decision) {
    CatchRecord r;
    r.timestamp = parse_iso8601(ts);
    r.species = std::move(species);
    r.length_cm = 55.0;
    r.verdict = Verdict{decision, decision == Decision::must_release ? std::vector{Reason::undersize} : std::vector<Reason>{}};
    r.outcome = outcome;
    return r;
}

} // namespace

TEST_CASE("parse an empty rule list") {
    const auto regs = parse_regulations(R"({"location": "lake-a", "rules": []})");
    CHECK(regs.location() == "lake-a");
    CHECK(regs.rules().empty());
}

TEST_CASE("parse a single rule verbatim") {
    const auto regs = parse_regulations(R"({"location": "maine-coast", "units": "cm", "rules": [
        {"species": "striped_bass", "min_length": 71.1, "bag_limit": 1,
         "season": {"open": "05-01", "close": "10-31"}}]})");
    REQUIRE(regs.rules().size() == 1);
    const Rule& r = regs.rules()[0];
    CHECK(r.species == "striped_bass");
    CHECK(r.min_length_cm == 71.1);
    CHECK_FALSE(r.max_length_cm.has_value());
    CHECK(r.bag_limit == 1);
    REQUIRE(r.season.has_value());
    CHECK(r.season->open == May / 1);
    CHECK(r.season->close == October / 31);
}

TEST_CASE("inches are converted at parse time") {
    const auto regs = parse_regulations(R"({"location": "x", "units": "in", "rules": [
        {"species": "bass", "min_length": 28, "max_length": 40}]})");
    CHECK(*regs.rules()[0].min_length_cm == doctest::Approx(71.12));
    CHECK(*regs.rules()[0].max_length_cm == doctest::Approx(101.6));
}

TEST_CASE("schema violations name the field") {
    auto schema_field = [](const char* doc) -> std::string {
        try {
            (void)parse_regulations(doc);
        } catch (const SchemaError& e) {
            return e.field();
        }
        return "<no error>";
    };
    CHECK(schema_field(R"({"location": "x", "rules": [{"species": "cod", "min_length": 80, "max_length": 60}]})") ==
          "rules[0] (cod).min_length");
    CHECK(schema_field(R"({"location": "x", "rules": [{"species": "cod", "min_length": 60, "max_length": 60}]})") ==
          "rules[0] (cod).min_length");
    CHECK(schema_field(R"({"location": "x", "rules": [{"species": "cod"}, {"species": "COD"}]})") ==
          "rules[1].species");
    CHECK(schema_field(R"({"location": "x", "rules": [{"species": "cod", "season": {"open": "02-30", "close": "03-01"}}]})") ==
          "rules[0] (cod).season.open");
    CHECK(schema_field(R"({"location": "x", "rules": [{"species": "cod", "season": {"open": "13-01", "close": "03-01"}}]})") ==
          "rules[0] (cod).season.open");
    CHECK(schema_field(R"({"location": "x", "rules": [{"species": "cod", "bag_limit": -1}]})") ==
          "rules[0] (cod).bag_limit");
    CHECK(schema_field(R"({"location": "x", "rules": [{"species": "cod", "min_len": 3}]})") == "rules[0].min_len");
    CHECK(schema_field(R"({"location": "x", "units": "mm", "rules": []})") == "units");
    CHECK(schema_field(R"({"rules": []})") == "location");
    CHECK(schema_field(R"({"location": "x"})") == "rules");
    CHECK(schema_field(R"({"location": "x", "rules": [{"species": "cod", "min_length": 0}]})") ==
          "rules[0] (cod).min_length");
}

TEST_CASE("syntax errors report a position") {
    try {
        (void)parse_regulations("{\"location\": \"x\",\n \"rules\": [}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() == 29);
    }
}

TEST_CASE("February 29 is a valid season endpoint") {
    const auto regs = parse_regulations(R"({"location": "x", "rules": [{"species": "pike", "season": {"open": "02-29", "close": "03-01"}}]})");
    CHECK(regs.rules()[0].season->open == February / 29);
}

TEST_CASE("serialize then parse round-trips") {
    const auto original = oracle::grid_regulations();
    CHECK(parse_regulations(serialize_regulations(original)) == original);

    std::mt19937 rng(4);
    std::uniform_real_distribution<double> len(1.0, 200.0);
    std::uniform_int_distribution<int> coin(0, 1), bag(0, 10), mon(1, 12), dd(1, 28);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Rule> rules;
        for (int k = 0; k < 5; ++k) {
            Rule r;
            r.species = "species_" + std::to_string(k);
            if (coin(rng))
                r.min_length_cm = len(rng);
            if (coin(rng))
                r.max_length_cm = (r.min_length_cm ? *r.min_length_cm : 0.0) + len(rng);
            if (coin(rng))
                r.bag_limit = bag(rng);
            if (coin(rng))
                r.season = Season{month{static_cast<unsigned>(mon(rng))} / dd(rng),
                                  month{static_cast<unsigned>(mon(rng))} / dd(rng)};
            rules.push_back(r);
        }
        const RegulationSet set("random", rules);
        CHECK(parse_regulations(serialize_regulations(set)) == set);
    }
}

TEST_CASE("evaluate: named examples") {
    const auto min50 = one_rule({"walleye", 50.0, std::nullopt, std::nullopt, std::nullopt});
    const auto v = evaluate(ctx("walleye", 30.0, 2024y / July / 4, 0), min50);
    CHECK(v == Verdict{Decision::must_release, {Reason::undersize}});

    const auto full = one_rule({"walleye", 50.0, std::nullopt, 2, Season{May / 1, October / 31}});
    CHECK(evaluate(ctx("walleye", 60.0, 2024y / July / 4, 0), full) == Verdict{Decision::keep_allowed, {}});
    CHECK(evaluate(ctx("Walleye", 60.0, 2024y / July / 4, 0), full).decision == Decision::keep_allowed);
    CHECK(evaluate(ctx("carp", 60.0, 2024y / July / 4, 0), full) == Verdict{Decision::no_rule, {}});
}

TEST_CASE("evaluate: boundary semantics") {
    const auto set = one_rule({"bass", 50.0, 70.0, 2, Season{May / 1, October / 31}});
    CHECK(evaluate(ctx("bass", 50.0, 2024y / June / 1, 0), set).decision == Decision::keep_allowed);
    CHECK(evaluate(ctx("bass", 70.0, 2024y / June / 1, 0), set).decision == Decision::keep_allowed);
    CHECK(evaluate(ctx("bass", 70.5, 2024y / June / 1, 0), set).reasons == std::vector{Reason::oversize});
    CHECK(evaluate(ctx("bass", 60.0, 2024y / May / 1, 0), set).decision == Decision::keep_allowed);
    CHECK(evaluate(ctx("bass", 60.0, 2024y / October / 31, 0), set).decision == Decision::keep_allowed);
    CHECK(evaluate(ctx("bass", 60.0, 2024y / November / 1, 0), set).reasons == std::vector{Reason::out_of_season});
    CHECK(evaluate(ctx("bass", 60.0, 2024y / June / 1, 1), set).decision == Decision::keep_allowed);
    CHECK(evaluate(ctx("bass", 60.0, 2024y / June / 1, 2), set).reasons == std::vector{Reason::bag_limit_reached});
    CHECK(evaluate(ctx("bass", std::nullopt, 2024y / June / 1, 0), set).reasons == std::vector{Reason::length_unknown});
    CHECK(evaluate(ctx("bass", 10.0, 2024y / December / 1, 5), set).reasons ==
          std::vector{Reason::undersize, Reason::out_of_season, Reason::bag_limit_reached});
}

TEST_CASE("evaluate: wrap-around season") {
    const auto set = one_rule({"trout", std::nullopt, std::nullopt, std::nullopt, Season{November / 1, February / 28}});
    CHECK(evaluate(ctx("trout", std::nullopt, 2024y / December / 25, 0), set).decision == Decision::keep_allowed);
    CHECK(evaluate(ctx("trout", std::nullopt, 2025y / January / 15, 0), set).decision == Decision::keep_allowed);
    CHECK(evaluate(ctx("trout", std::nullopt, 2024y / June / 1, 0), set).reasons == std::vector{Reason::out_of_season});
    // No length constraint, so a missing length is fine.
    CHECK(evaluate(ctx("trout", std::nullopt, 2024y / November / 1, 0), set).reasons.empty());
}

TEST_CASE("evaluate matches the predicate oracle on the exhaustive grid") {
    const auto set = oracle::grid_regulations();
    const auto grid = oracle::boundary_grid();
    REQUIRE(grid.size() >= 200);
    int mismatches = 0;
    for (const auto& c : grid)
        if (!(evaluate(c, set) == oracle::expected_verdict(c, set)))
            ++mismatches;
    CHECK(mismatches == 0);
}

TEST_CASE("min-length monotonicity") {
    const auto set = one_rule({"bass", 40.0, 90.0, 5, std::nullopt});
    bool kept = false;
    for (double len = 1.0; len <= 90.0; len += 0.25) {
        const bool now = evaluate(ctx("bass", len, 2024y / June / 1, 0), set).decision == Decision::keep_allowed;
        if (kept)
            CHECK(now);
        kept = kept || now;
    }
    CHECK(kept);
}

TEST_CASE("verdict invariants over the grid") {
    const auto set = oracle::grid_regulations();
    for (const auto& c : oracle::boundary_grid()) {
        const auto v = evaluate(c, set);
        if (v.decision == Decision::must_release)
            CHECK_FALSE(v.reasons.empty());
        if (v.decision != Decision::must_release)
            CHECK(v.reasons.empty());
        CHECK(evaluate(c, set) == v);
    }
}

TEST_CASE("bag counter") {
    CHECK(bag_counter({}, "bass", 2024y / June / 1) == 0);

    std::vector<CatchRecord> log{
        record("2024-06-01T06:00:00.000Z", "bass", Outcome::kept, Decision::keep_allowed),
        record("2024-06-01T06:10:00.000Z", "bass", Outcome::released, Decision::must_release),
        record("2024-06-01T07:00:00.000Z", "Bass", Outcome::kept, Decision::keep_allowed),
        record("2024-06-01T07:30:00.000Z", "bass", Outcome::released, Decision::keep_allowed),
        record("2024-06-01T08:00:00.000Z", "bass", Outcome::kept, Decision::keep_allowed),
    };
    CHECK(bag_counter(log, "bass", 2024y / June / 1) == 3);
    CHECK(bag_counter(log, "bass", 2024y / June / 2) == 0);

    std::swap(log[0], log[1]);
    CHECK_THROWS_AS(bag_counter(log, "bass", 2024y / June / 1), InvalidArgument);
}

TEST_CASE("bag counter matches a filter-and-count oracle on mixed-date logs") {
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> step(0, 20000), sp(0, 2), out(0, 2);
    const char* names[] = {"bass", "perch", "cod"};
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<CatchRecord> log;
        auto t = parse_iso8601("2024-03-10T20:00:00.000Z");
        for (int i = 0; i < 40; ++i) {
            t += std::chrono::seconds{step(rng)};
            CatchRecord r;
            r.timestamp = t;
            r.species = names[sp(rng)];
            r.outcome = static_cast<Outcome>(out(rng));
            r.verdict = Verdict{r.outcome == Outcome::kept ? Decision::keep_allowed : Decision::must_release,
                                r.outcome == Outcome::kept ? std::vector<Reason>{} : std::vector{Reason::oversize}};
            log.push_back(r);
        }
        for (int d = 10; d <= 20; ++d)
            for (const char* s : names) {
                const year_month_day date{2024y / March / d};
                int expected = 0;
                for (const auto& r : log)
                    if (r.species == s && r.outcome == Outcome::kept &&
                        year_month_day{floor<days>(r.timestamp)} == date)
                        ++expected;
                CHECK(bag_counter(log, s, date) == expected);
            }
    }
}

TEST_CASE("catch record json round trip and KEPT invariant") {
    CatchRecord r = record("2024-06-01T06:00:00.250Z", "bass", Outcome::kept, Decision::keep_allowed);
    r.frame_id = 77;
    CHECK(record_from_json(nlohmann::json::parse(record_to_json(r).dump())) == r);
    CHECK(record_to_json(r).dump() ==
          R"({"timestamp":"2024-06-01T06:00:00.250Z","species":"bass","length_cm":55.0,"decision":"KEEP_ALLOWED","reasons":[],"outcome":"KEPT","frame_id":77})");

    CatchRecord lost;
    lost.timestamp = parse_iso8601("2024-06-01T06:00:00Z");
    lost.species = "perch";
    CHECK(record_from_json(nlohmann::json::parse(record_to_json(lost).dump())) == lost);

    auto bad = record_to_json(record("2024-06-01T06:00:00Z", "bass", Outcome::kept, Decision::must_release));
    CHECK_THROWS_AS(record_from_json(nlohmann::json::parse(bad.dump())), SchemaError);
}

TEST_CASE("shipped fixture packs parse") {
    const std::filesystem::path dir = std::filesystem::path(FINSIGHT_DATA_DIR) / "regs";
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json")
            continue;
        CHECK_NOTHROW((void)load_regulations(entry.path()));
        ++count;
    }
    CHECK(count >= 2);
}
