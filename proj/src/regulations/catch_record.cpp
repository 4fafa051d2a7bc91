#include "finsight/regulations/catch_record.hpp"

#include "finsight/common/error.hpp"

#include <nlohmann/json.hpp>

namespace finsight::regulations {

const char* to_string(Outcome o) noexcept {
    switch (o) {
    case Outcome::kept: return "KEPT";
    case Outcome::released: return "RELEASED";
    case Outcome::lost: return "LOST";
    }
    return "?";
}

Outcome outcome_from_string(std::string_view s) {
    for (auto o : {Outcome::kept, Outcome::released, Outcome::lost})
        if (s == to_string(o))
            return o;
    throw SchemaError("outcome", "unknown outcome \"" + std::string(s) + "\"");
}

nlohmann::ordered_json record_to_json(const CatchRecord& r) {
    nlohmann::ordered_json j;
    j["timestamp"] = to_iso8601(r.timestamp);
    j["species"] = r.species;
    j["length_cm"] = r.length_cm ? nlohmann::ordered_json(*r.length_cm) : nlohmann::ordered_json(nullptr);
    j["decision"] = r.verdict ? nlohmann::ordered_json(to_string(r.verdict->decision)) : nlohmann::ordered_json(nullptr);
    auto reasons = nlohmann::ordered_json::array();
    if (r.verdict)
        for (auto reason : r.verdict->reasons)
            reasons.push_back(to_string(reason));
    j["reasons"] = std::move(reasons);
    j["outcome"] = to_string(r.outcome);
    j["frame_id"] = r.frame_id;
    return j;
}

CatchRecord record_from_json(const nlohmann::json& j) {
    try {
        CatchRecord r;
        r.timestamp = parse_iso8601(j.at("timestamp").get<std::string>());
        r.species = j.at("species").get<std::string>();
        if (!j.at("length_cm").is_null())
            r.length_cm = j.at("length_cm").get<double>();
        if (!j.at("decision").is_null()) {
            Verdict v;
            v.decision = decision_from_string(j.at("decision").get<std::string>());
            for (const auto& reason : j.at("reasons"))
                v.reasons.push_back(reason_from_string(reason.get<std::string>()));
            r.verdict = std::move(v);
        }
        r.outcome = outcome_from_string(j.at("outcome").get<std::string>());
        r.frame_id = j.at("frame_id").get<std::uint32_t>();
        if (r.outcome == Outcome::kept && (!r.verdict || r.verdict->decision != Decision::keep_allowed))
            throw SchemaError("outcome", "KEPT requires a KEEP_ALLOWED verdict");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("catch record", e.what());
    }
}

int bag_counter(const std::vector<CatchRecord>& log, std::string_view species, CalendarDate date) {
    const auto key = fold_species(species);
    int count = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (i > 0 && log[i].timestamp < log[i - 1].timestamp)
            throw InvalidArgument("catch log is not chronological at record " + std::to_string(i));
        const auto& r = log[i];
        if (r.outcome == Outcome::kept && fold_species(r.species) == key && utc_date(r.timestamp) == date)
            ++count;
    }
    return count;
}

} // namespace finsight::regulations
