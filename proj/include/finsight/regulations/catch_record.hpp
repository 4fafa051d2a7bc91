#pragma once

#include "finsight/common/time.hpp"
#include "finsight/regulations/regulations.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace finsight::regulations {

enum class Outcome { kept, released, lost };

const char* to_string(Outcome o) noexcept;
Outcome outcome_from_string(std::string_view s);

/// One line of the catch log.
struct CatchRecord {
    Timestamp timestamp;
    std::string species;
    std::optional<double> length_cm;
    /// Absent when the fish was lost before a verdict existed.
    std::optional<Verdict> verdict;
    Outcome outcome = Outcome::lost;
    std::uint32_t frame_id = 0;

    bool operator==(const CatchRecord&) const = default;
};

/// Field order is fixed so serialized logs are byte-stable.
nlohmann::ordered_json record_to_json(const CatchRecord& r);
CatchRecord record_from_json(const nlohmann::json& j);

/// Kept fish of `species` (case-insensitive) on `date` (UTC). Throws
/// InvalidArgument if the log is not in chronological order.
int bag_counter(const std::vector<CatchRecord>& log, std::string_view species, CalendarDate date);

} // namespace finsight::regulations
