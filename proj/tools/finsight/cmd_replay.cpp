#include "cli_common.hpp"

#include "finsight/session/catch_log.hpp"
#include "finsight/session/trace.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace finsight::cli {

namespace {

struct ReplayOptions {
    std::filesystem::path trace;
    std::filesystem::path out;
    std::filesystem::path expect;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw CliError(Exit::io_error, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// 1-based number of the first line where the texts differ.
std::size_t first_difference(const std::string& a, const std::string& b) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] != b[i])
            return line;
        if (a[i] == '\n')
            ++line;
    }
    return line;
}

void run_replay(const ReplayOptions& o, Globals& g) {
    require_input(o.trace);
    const auto result = session::replay(session::load_trace(o.trace));
    const std::string text = session::log_text(result.log);

    if (!o.out.empty()) {
        std::ofstream out(o.out, std::ios::binary);
        if (!out)
            throw CliError(Exit::cant_create, "cannot write " + o.out.string());
        out << text;
    } else if (o.expect.empty()) {
        std::cout << text;
    }
    if (!o.expect.empty()) {
        require_input(o.expect);
        const std::string want = slurp(o.expect);
        if (want == text) {
            std::cout << "replay matches " << o.expect.string() << " (" << result.log.size() << " records)\n";
        } else {
            std::cerr << "replay differs from " << o.expect.string() << " at line " << first_difference(text, want)
                      << "\n";
            g.result = Exit::result_mismatch;
        }
    }
}

} // namespace

void add_replay(CLI::App& app, Globals& g) {
    auto o = std::make_shared<ReplayOptions>();
    auto* cmd = app.add_subcommand("replay", "Rebuild the catch log from a recorded session trace");
    cmd->add_option("trace", o->trace, "Session trace (JSON lines)")->required();
    cmd->add_option("--out", o->out, "Write the log here instead of stdout");
    cmd->add_option("--expect", o->expect, "Compare with this log byte for byte; exit 1 on any difference");
    cmd->callback([o, &g] { run_replay(*o, g); });
}

} // namespace finsight::cli
