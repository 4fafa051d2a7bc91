#include <doctest.h>

#include <array>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path data_dir = FINSIGHT_DATA_DIR;

struct Run {
    int code;
    std::string out;
};

/// Runs the CLI with `args` (shell syntax), stderr discarded.
Run cli(const std::string& args) {
    const std::string cmd = std::string("\"") + FINSIGHT_CLI + "\" " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const char* name) {
    const auto p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p;
}

const std::string lake = (data_dir / "regs" / "lake_fixture.json").string();

} // namespace

TEST_CASE("ems commands print the published figures") {
    CHECK(cli("ems calc --current 0.020 --resistance 21800").out == "436 V\n");
    CHECK(cli("ems calc --current 0.090").out == "1962 V\n");
    CHECK(cli("ems tension --current 0.090 --mass-g 200").out == "2 N\n");
    CHECK(cli("ems transformer --primary 5 --ratio 98.4").out == "492 V\n");
    CHECK(cli("ems transformer --primary 5 --secondary 492").out == "98.4\n");
    CHECK(cli("ems safety --current 0.020").code == 0);
    const auto unsafe = cli("ems safety --current 0.090");
    CHECK(unsafe.code == 1);
    CHECK(unsafe.out.rfind("over-voltage", 0) == 0);
}

TEST_CASE("regs check exit codes follow the verdict") {
    const auto keep = cli("regs check --file " + lake + " --species largemouth_bass --length-cm 40 --date 2024-07-04");
    CHECK(keep.code == 0);
    CHECK(keep.out == "KEEP_ALLOWED\n");
    const auto release = cli("regs check --file " + lake +
                             " --species largemouth_bass --length-cm 25 --date 2024-05-01 --bag 2");
    CHECK(release.code == 1);
    CHECK(release.out == "MUST_RELEASE UNDERSIZE OUT_OF_SEASON BAG_LIMIT_REACHED\n");
    const auto none = cli("regs check --file " + lake + " --species pike --length-cm 40 --date 2024-07-04 --json");
    CHECK(none.code == 2);
    CHECK(none.out == "{\"decision\":\"NO_RULE\",\"reasons\":[]}\n");
    CHECK(cli("regs check --file " + lake + " --species fish --date 2024-07-04").out ==
          "MUST_RELEASE LENGTH_UNKNOWN\n");
    CHECK(cli("regs validate --file " + lake).code == 0);
}

TEST_CASE("failures map to distinct exit codes") {
    CHECK(cli("").code == 64);
    CHECK(cli("--help").code == 0);
    CHECK(cli("ems calc --current").code == 64);
    CHECK(cli("ems calc --current abc").code == 64);
    CHECK(cli("regs check --species x --date 2024-01-01").code == 64);
    CHECK(cli("regs check --file /nonexistent.json --species x --date 2024-01-01").code == 66);
    CHECK(cli("regs check --file " + lake + " --species x --date 2024-02-30").code == 65);
    CHECK(cli("ems calc --resistance 0").code == 64);
    CHECK(cli("bob simulate --clock virtual --listen 127.0.0.1:0").code == 64);
    CHECK(cli("bob simulate --clock real").code == 64);

    const auto bad = scratch("finsight_cli_bad_regs.json");
    std::ofstream(bad) << R"({"location": "x", "rules": [{"species": "a", "min_length": -1}]})";
    CHECK(cli("regs validate --file " + bad.string()).code == 65);
    std::ofstream(bad) << R"({"location": )";
    CHECK(cli("regs validate --file " + bad.string()).code == 65);
}

TEST_CASE("--config supplies option values per subcommand") {
    const auto cfg = scratch("finsight_cli_config.json");
    std::ofstream(cfg) << R"({"seed": 5, "ems": {"calc": {"current": 0.09, "resistance": 1000}}})";
    CHECK(cli("--config " + cfg.string() + " ems calc").out == "90 V\n");
    // The command line wins over the file.
    CHECK(cli("--config " + cfg.string() + " ems calc --resistance 2000").out == "180 V\n");
    std::ofstream(cfg) << "[1, 2]";
    CHECK(cli("--config " + cfg.string() + " ems calc").code == 65);
}

TEST_CASE("bob simulate on the virtual clock reports the battery scenario") {
    const auto r = cli("bob simulate --duration 10800");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"frames\":259201") != std::string::npos);
    CHECK(r.out.find("\"fps\":24.0") != std::string::npos);
    CHECK(r.out.find("\"consumed_mah\":400.0") != std::string::npos);
}

TEST_CASE("augment corpus, run and dedup are deterministic in the seed") {
    const auto corpus = scratch("finsight_cli_corpus");
    REQUIRE(cli("--seed 3 augment corpus --out " + corpus.string() + " --uniques 4 --variants 3 --size 32").code == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(corpus))
        files += e.path().extension() == ".png";
    CHECK(files == 12);

    const auto a = scratch("finsight_cli_aug_a");
    const auto b = scratch("finsight_cli_aug_b");
    const auto c = scratch("finsight_cli_aug_c");
    const std::string ops = " --fisheye 40 --contrast 0.8:1.2 --noise 5 --blur 3:45";
    REQUIRE(cli("--seed 9 augment run --in " + corpus.string() + " --out " + a.string() + ops).code == 0);
    REQUIRE(cli("--seed 9 augment run --in " + corpus.string() + " --out " + b.string() + ops).code == 0);
    REQUIRE(cli("--seed 10 augment run --in " + corpus.string() + " --out " + c.string() + ops).code == 0);
    bool any_diff = false;
    for (const auto& e : fs::directory_iterator(corpus)) {
        const auto name = e.path().filename();
        CHECK(slurp(a / name) == slurp(b / name));
        any_diff = any_diff || slurp(a / name) != slurp(c / name);
    }
    CHECK(any_diff);
    CHECK(cli("augment run --in " + corpus.string() + " --out " + a.string() + " --blur 0:10").code == 64);
    CHECK(cli("augment run --in /nonexistent --out " + a.string()).code == 66);

    const auto manifest = scratch("finsight_cli_manifest.json");
    const auto d = cli("augment dedup --in " + corpus.string() + " --manifest " + manifest.string());
    REQUIRE(d.code == 0);
    CHECK(d.out == "kept 4 of 12 (66.7% reduction)\n");
    const std::string m = slurp(manifest);
    CHECK(m.find("\"kept_count\": 4") != std::string::npos);
    CHECK(m.find("\"comparisons\"") != std::string::npos);
}

TEST_CASE("replay reproduces the golden logs and flags differences") {
    for (const char* name : {"happy_path", "mixed_session"}) {
        const auto trace = (data_dir / "golden" / (std::string(name) + ".trace")).string();
        const auto log = data_dir / "golden" / (std::string(name) + ".log");
        const auto r = cli("replay " + trace);
        CHECK(r.code == 0);
        CHECK(r.out == slurp(log));
        CHECK(cli("replay " + trace + " --expect " + log.string()).code == 0);
    }
    const auto wrong = scratch("finsight_cli_wrong.log");
    std::ofstream(wrong) << "{}\n";
    CHECK(cli("replay " + (data_dir / "golden" / "happy_path.trace").string() + " --expect " + wrong.string()).code ==
          1);
    CHECK(cli("replay /nonexistent.trace").code == 66);
}

TEST_CASE("engine simulate runs a whole session offline") {
    const auto log = scratch("finsight_cli_engine.jsonl");
    const auto trace = scratch("finsight_cli_engine.trace");
    const auto scene = (data_dir / "scenes" / "keeper_fish.json").string();
    const auto r = cli("engine simulate --regs " + lake + " --scene " + scene + " --depth scene:" + scene +
                       " --duration 25 --log " + log.string() + " --trace " + trace.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"outcomes\":{\"KEPT\":3,\"RELEASED\":0,\"LOST\":0}") != std::string::npos);
    // The recorded trace replays to the same log.
    CHECK(cli("replay " + trace.string() + " --expect " + log.string()).code == 0);
}

TEST_CASE("real clock: bob and engine talk over TCP from the command line") {
    const auto bob_out = scratch("finsight_cli_bob.out");
    const auto bob_err = scratch("finsight_cli_bob.err");
    const auto log = scratch("finsight_cli_real.jsonl");
    const auto scene = (data_dir / "scenes" / "undersize_fish.json").string();
    // The bob picks a free port and announces it on stderr.
    const std::string bob = std::string("\"") + FINSIGHT_CLI + "\" bob simulate --clock real --listen 127.0.0.1:0" +
                            " --scene " + scene + " --capacity-mah 0.15 > " + bob_out.string() + " 2> " +
                            bob_err.string() + " &";
    REQUIRE(std::system(bob.c_str()) == 0);
    std::string port;
    for (int i = 0; i < 100 && port.empty(); ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        const std::string err = slurp(bob_err);
        if (const auto colon = err.rfind(':'); colon != std::string::npos && err.back() == '\n')
            port = err.substr(colon + 1, err.size() - colon - 2);
    }
    REQUIRE(!port.empty());

    const auto r = cli("engine run --bob 127.0.0.1:" + port + " --regs " + lake + " --depth scene:" + scene +
                       " --ui-listen 127.0.0.1:0 --decision-timeout 1 --log " + log.string() + " --duration 20");
    REQUIRE(r.code == 0);
    // 0.15 mAh lasts about 4 s: one fish, released on the decision timeout, then BYE.
    CHECK(r.out.find("\"device_said_bye\":true") != std::string::npos);
    CHECK(r.out.find("\"RELEASED\":1") != std::string::npos);
    CHECK(slurp(log).find("\"outcome\":\"RELEASED\"") != std::string::npos);
    for (int i = 0; i < 100 && slurp(bob_out).empty(); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    CHECK(slurp(bob_out).find("\"said_bye\":true") != std::string::npos);
}

TEST_CASE("engine run reports an unreachable bob") {
    CHECK(cli("engine run --bob 127.0.0.1:1 --regs " + lake + " --ui-listen 127.0.0.1:0 --connect-timeout 0.2").code ==
          69);
}
