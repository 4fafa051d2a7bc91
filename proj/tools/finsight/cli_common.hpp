#pragma once

#include "finsight/common/error.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace finsight::cli {

// Exit codes. 1 and 2 carry command results (regs check verdicts, replay
// mismatch); failures use the sysexits range.
enum Exit : int {
    ok = 0,
    result_release = 1,
    result_no_rule = 2,
    result_mismatch = 1,
    usage = 64,
    data_error = 65,
    no_input = 66,
    unavailable = 69,
    internal = 70,
    cant_create = 73,
    io_error = 74,
};

struct CliError : std::runtime_error {
    CliError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
    int code;
};

struct Globals {
    std::uint64_t seed = 0;
    int verbose = 0;
    /// Exit code chosen by the subcommand that ran.
    int result = Exit::ok;
};

/// Throws CliError(no_input) unless `p` names an existing file (or directory
/// when `dir` is set).
void require_input(const std::filesystem::path& p, bool dir = false);

/// Shortest round-trip form capped at 10 significant digits: 436 -> "436",
/// 364.08 -> "364.08".
std::string format_number(double v);

void add_augment(CLI::App& app, Globals& g);
void add_regs(CLI::App& app, Globals& g);
void add_ems(CLI::App& app, Globals& g);
void add_bob(CLI::App& app, Globals& g);
void add_engine(CLI::App& app, Globals& g);
void add_replay(CLI::App& app, Globals& g);

/// CLI11 config reader for `--config FILE` in JSON. Nested objects name
/// subcommands: {"seed": 1, "ems": {"calc": {"current": 0.02}}}.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                          std::string prefix) const override;
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

} // namespace finsight::cli

namespace finsight::bobproto {
class FrameSource;
}

namespace finsight::cli {

/// Frames for a simulated bob: a PNG directory or a rendered scene file.
struct SourceOptions {
    std::filesystem::path frames;
    std::filesystem::path scene;
    int width = 320;
    int height = 240;
    double fish_period_s = 10.0;
    double fish_visible_s = 4.0;

    void add_to(CLI::App* cmd);
    std::shared_ptr<bobproto::FrameSource> make(double fps) const;
};

} // namespace finsight::cli
