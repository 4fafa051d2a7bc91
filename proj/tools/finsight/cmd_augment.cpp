#include "cli_common.hpp"

#include "finsight/augment/metrics.hpp"
#include "finsight/augment/png_io.hpp"
#include "finsight/augment/synthetic_corpus.hpp"
#include "finsight/augment/transforms.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>

namespace finsight::cli {

namespace fs = std::filesystem;
using namespace finsight::augment;

namespace {

std::vector<fs::path> list_pngs(const fs::path& dir) {
    require_input(dir, true);
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw CliError(Exit::cant_create, "cannot create directory " + dir.string());
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw CliError(Exit::usage, std::string(what) + ": expected A:B, got '" + text + "'");
    try {
        std::size_t used_a = 0;
        std::size_t used_b = 0;
        const std::string a = text.substr(0, colon);
        const std::string b = text.substr(colon + 1);
        const double va = std::stod(a, &used_a);
        const double vb = std::stod(b, &used_b);
        if (used_a != a.size() || used_b != b.size())
            throw std::invalid_argument(text);
        return {va, vb};
    } catch (const std::logic_error&) {
        throw CliError(Exit::usage, std::string(what) + ": expected A:B, got '" + text + "'");
    }
}

struct RunOptions {
    fs::path in;
    fs::path out;
    std::optional<double> fisheye;
    std::string contrast;
    std::optional<double> noise;
    std::string blur;
};

void run_augment(const RunOptions& o, const Globals& g) {
    std::optional<std::pair<double, double>> contrast;
    if (!o.contrast.empty()) {
        contrast = parse_pair(o.contrast, "--contrast");
        if (!(contrast->first > 0.0) || contrast->second < contrast->first)
            throw CliError(Exit::usage, "--contrast: need 0 < LO <= HI");
    }
    std::optional<BlurKernel> blur;
    if (!o.blur.empty()) {
        const auto [len, angle_deg] = parse_pair(o.blur, "--blur");
        if (len < 1.0 || len != static_cast<int>(len))
            throw CliError(Exit::usage, "--blur: LEN must be a positive integer");
        blur = BlurKernel::box(static_cast<int>(len), angle_deg * std::numbers::pi / 180.0);
    }
    if (o.fisheye && !(*o.fisheye > 0.0))
        throw CliError(Exit::usage, "--fisheye: focal length must be positive");
    if (o.noise && *o.noise < 0.0)
        throw CliError(Exit::usage, "--noise: sigma must be non-negative");

    const auto inputs = list_pngs(o.in);
    make_dir(o.out);
    std::mt19937_64 rng(g.seed);
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& path : inputs) {
        // Draw per-image parameters in a fixed order so output is a pure
        // function of the seed and the sorted input list.
        const std::uint64_t noise_seed = rng();
        const double factor =
            contrast ? std::uniform_real_distribution<double>(contrast->first, contrast->second)(rng) : 1.0;

        ImageBuffer img = read_png(path);
        if (o.fisheye)
            img = fisheye_transform(img, FisheyeParams::centered(img, *o.fisheye));
        if (contrast)
            img = contrast_adjust(img, factor);
        if (blur)
            img = motion_blur(img, *blur);
        if (o.noise)
            img = scatter_noise(img, *o.noise, noise_seed);
        write_png(o.out / path.filename(), img);

        nlohmann::ordered_json entry;
        entry["file"] = path.filename().string();
        entry["contrast"] = factor;
        entry["noise_seed"] = noise_seed;
        files.push_back(std::move(entry));
        if (g.verbose > 0)
            std::cerr << "augmented " << path.filename().string() << "\n";
    }
    nlohmann::ordered_json summary;
    summary["images"] = inputs.size();
    summary["seed"] = g.seed;
    summary["files"] = std::move(files);
    std::ofstream(o.out / "augment_manifest.json") << summary.dump(2) << "\n";
    std::cout << "augmented " << inputs.size() << " images into " << o.out.string() << "\n";
}

struct DedupOptions {
    fs::path in;
    fs::path manifest;
    DedupConfig cfg;
};

void run_dedup(const DedupOptions& o) {
    const auto inputs = list_pngs(o.in);
    std::vector<ImageBuffer> corpus;
    corpus.reserve(inputs.size());
    for (const auto& p : inputs)
        corpus.push_back(read_png(p));
    const DedupReport report = dedup_with_report(corpus, o.cfg);

    auto name = [&](std::size_t i) { return inputs[i].filename().string(); };
    auto score_json = [&](const PairScore& s) {
        nlohmann::ordered_json j;
        j["kept"] = name(s.kept_index);
        j["candidate"] = name(s.candidate_index);
        j["ssim"] = s.ssim;
        j["patch_distance"] = s.patch_distance;
        j["duplicate"] = s.duplicate;
        return j;
    };
    const double reduction =
        inputs.empty() ? 0.0 : 1.0 - static_cast<double>(report.kept.size()) / static_cast<double>(inputs.size());

    if (!o.manifest.empty()) {
        nlohmann::ordered_json m;
        m["config"] = {{"patch", o.cfg.patch_size},
                       {"ssd_thresh", o.cfg.ssd_threshold},
                       {"ssim_thresh", o.cfg.ssim_threshold},
                       {"ssim_window", o.cfg.ssim_window}};
        m["input_count"] = inputs.size();
        m["kept_count"] = report.kept.size();
        m["reduction"] = reduction;
        m["kept"] = nlohmann::ordered_json::array();
        for (auto i : report.kept)
            m["kept"].push_back(name(i));
        m["dropped"] = nlohmann::ordered_json::array();
        for (const auto& s : report.dropped)
            m["dropped"].push_back(score_json(s));
        m["comparisons"] = nlohmann::ordered_json::array();
        for (const auto& s : report.comparisons)
            m["comparisons"].push_back(score_json(s));
        std::ofstream out(o.manifest);
        if (!out)
            throw CliError(Exit::cant_create, "cannot write " + o.manifest.string());
        out << m.dump(2) << "\n";
    }
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.1f", reduction * 100.0);
    std::cout << "kept " << report.kept.size() << " of " << inputs.size() << " (" << pct << "% reduction)\n";
}

struct CorpusOptions {
    fs::path out;
    CorpusSpec spec;
};

void run_corpus(CorpusOptions o, const Globals& g) {
    o.spec.seed = g.seed;
    make_dir(o.out);
    const auto corpus = make_dedup_corpus(o.spec);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "img_%05zu.png", i);
        write_png(o.out / name, corpus[i]);
    }
    std::cout << "wrote " << corpus.size() << " images (" << o.spec.uniques << " scenes x " << o.spec.variants
              << " variants) to " << o.out.string() << "\n";
}

} // namespace

void add_augment(CLI::App& app, Globals& g) {
    auto* aug = app.add_subcommand("augment", "Image augmentation and near-duplicate reduction");
    aug->require_subcommand(1);

    auto run_opts = std::make_shared<RunOptions>();
    auto* run = aug->add_subcommand("run", "Apply fisheye, contrast, blur and noise to every PNG in a directory");
    run->add_option("--in", run_opts->in, "Input directory of PNG files")->required();
    run->add_option("--out", run_opts->out, "Output directory")->required();
    run->add_option("--fisheye", run_opts->fisheye, "Fisheye focal length in pixels");
    run->add_option("--contrast", run_opts->contrast, "Contrast factor range LO:HI, sampled per image");
    run->add_option("--noise", run_opts->noise, "Gaussian noise sigma in 8-bit levels");
    run->add_option("--blur", run_opts->blur, "Motion blur LEN:ANGLE (pixels, degrees)");
    run->callback([run_opts, &g] { run_augment(*run_opts, g); });

    auto dd = std::make_shared<DedupOptions>();
    auto* dedup_cmd = aug->add_subcommand("dedup", "Greedy near-duplicate reduction with SSD and SSIM");
    dedup_cmd->add_option("--in", dd->in, "Input directory of PNG files")->required();
    dedup_cmd->add_option("--patch", dd->cfg.patch_size, "Patch size for the SSD comparison")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    dedup_cmd->add_option("--ssd-thresh", dd->cfg.ssd_threshold, "Mean per-pixel patch SSD at or below which images match")
        ->capture_default_str();
    dedup_cmd->add_option("--ssim-thresh", dd->cfg.ssim_threshold, "SSIM at or above which images match")
        ->capture_default_str();
    dedup_cmd->add_option("--ssim-window", dd->cfg.ssim_window, "SSIM tile size")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    dedup_cmd->add_option("--manifest", dd->manifest, "Write kept/dropped lists with scores to this JSON file");
    dedup_cmd->callback([dd] { run_dedup(*dd); });

    auto co = std::make_shared<CorpusOptions>();
    auto* corpus = aug->add_subcommand("corpus", "Generate a synthetic corpus of scenes with near copies");
    corpus->add_option("--out", co->out, "Output directory")->required();
    corpus->add_option("--uniques", co->spec.uniques, "Distinct scenes")->capture_default_str()->check(CLI::PositiveNumber);
    corpus->add_option("--variants", co->spec.variants, "Images per scene, original included")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    corpus->add_option("--size", co->spec.size, "Image side in pixels")->capture_default_str()->check(CLI::PositiveNumber);
    corpus->add_option("--noise", co->spec.noise_sigma, "Noise sigma of the near copies")->capture_default_str();
    corpus->callback([co, &g] { run_corpus(*co, g); });
}

} // namespace finsight::cli
