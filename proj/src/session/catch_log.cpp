#include "finsight/session/catch_log.hpp"

#include "finsight/common/error.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

namespace finsight::session {

namespace {

std::string line_for(const regulations::CatchRecord& r) {
    return regulations::record_to_json(r).dump() + "\n";
}

class Fd {
public:
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd() {
        if (fd_ >= 0)
            ::close(fd_);
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    int get() const noexcept { return fd_; }

private:
    int fd_;
};

} // namespace

CatchLog::CatchLog(std::filesystem::path path, WriteFn writer)
    : path_(std::move(path)), writer_(writer ? std::move(writer) : WriteFn(::write)) {}

void CatchLog::append(const regulations::CatchRecord& record) {
    const std::string line = line_for(record);
    Fd fd(::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644));
    if (fd.get() < 0)
        throw IoError("cannot open " + path_.string() + ": " + std::strerror(errno));
    struct stat st {};
    if (::fstat(fd.get(), &st) != 0)
        throw IoError("cannot stat " + path_.string() + ": " + std::strerror(errno));
    const off_t before = st.st_size;

    const ssize_t n = writer_(fd.get(), line.data(), line.size());
    if (n == static_cast<ssize_t>(line.size()))
        return;
    const int err = errno;
    // Drop whatever part of the line made it to disk.
    if (::ftruncate(fd.get(), before) != 0)
        throw IoError("append to " + path_.string() + " failed and the partial line could not be removed");
    throw IoError("append to " + path_.string() + " failed: " +
                  (n < 0 ? std::string(std::strerror(err)) : "short write of " + std::to_string(n) + " bytes"));
}

CatchLog::Loaded CatchLog::load(const std::filesystem::path& path) {
    Loaded out;
    if (!std::filesystem::exists(path))
        return out;
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        ++line_no;
        const std::size_t start = pos;
        const std::size_t nl = text.find('\n', pos);
        const bool complete = nl != std::string::npos;
        const std::string_view line(text.data() + pos, (complete ? nl : text.size()) - pos);
        pos = complete ? nl + 1 : text.size();
        const bool last = pos >= text.size();
        if (!complete) {
            out.truncated = 1;
            break;
        }
        try {
            out.records.push_back(regulations::record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            if (last) {
                out.truncated = 1;
                break;
            }
            throw ParseError(path.string() + " line " + std::to_string(line_no) + ": " + e.what(), start);
        }
    }
    return out;
}

std::string log_text(const std::vector<regulations::CatchRecord>& records) {
    std::string out;
    for (const auto& r : records)
        out += line_for(r);
    return out;
}

} // namespace finsight::session
