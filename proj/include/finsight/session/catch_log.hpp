#pragma once

#include "finsight/regulations/catch_record.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <sys/types.h>

namespace finsight::session {

/// Line-delimited JSON catch log. Each append is one write(2) of a whole
/// line on an O_APPEND descriptor; a failed or short write is rolled back
/// with ftruncate so earlier lines stay intact.
class CatchLog {
public:
    /// Stand-in for ::write, for fault injection.
    using WriteFn = std::function<ssize_t(int fd, const void* buf, std::size_t n)>;

    explicit CatchLog(std::filesystem::path path, WriteFn writer = {});

    /// Throws IoError when the record could not be stored.
    void append(const regulations::CatchRecord& record);

    const std::filesystem::path& path() const noexcept { return path_; }

    struct Loaded {
        std::vector<regulations::CatchRecord> records;
        /// A final line cut short (no newline or unparsable) from an interrupted append.
        std::size_t truncated = 0;
    };

    /// A missing file is an empty log. Throws ParseError naming the line for
    /// a damaged line that is not the last.
    static Loaded load(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    WriteFn writer_;
};

/// The exact bytes a log holding `records` contains.
std::string log_text(const std::vector<regulations::CatchRecord>& records);

} // namespace finsight::session
