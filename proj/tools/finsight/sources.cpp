#include "cli_common.hpp"

#include "finsight/vision/depth.hpp"

#include "finsight/bobproto/frame_source.hpp"

#include <cmath>

namespace finsight::cli {

void SourceOptions::add_to(CLI::App* cmd) {
    auto* f = cmd->add_option("--frames", frames, "Directory of PNG frames, streamed in name order");
    auto* s = cmd->add_option("--scene", scene, "Scene JSON rendered as a key-coloured fish");
    f->excludes(s);
    cmd->add_option("--width", width, "Rendered scene width")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--height", height, "Rendered scene height")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--fish-period", fish_period_s, "Seconds per fish appearance cycle; 0 keeps it in view")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--fish-visible", fish_visible_s, "Seconds the fish is in view each cycle")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
}

std::shared_ptr<bobproto::FrameSource> SourceOptions::make(double fps) const {
    if (!frames.empty()) {
        require_input(frames, true);
        return std::make_shared<bobproto::DirectorySource>(frames);
    }
    bobproto::SyntheticSceneSource::Config cfg;
    if (!scene.empty()) {
        require_input(scene);
        cfg.scene = vision::load_scene(scene);
    } else {
        cfg.scene.objects.push_back({"fish", 1.0, {width / 2 - 20, height / 2 - 6, 40, 12}});
    }
    cfg.width = width;
    cfg.height = height;
    cfg.period = static_cast<std::uint64_t>(std::llround(fish_period_s * fps));
    cfg.visible = static_cast<std::uint64_t>(std::llround(fish_visible_s * fps));
    return std::make_shared<bobproto::SyntheticSceneSource>(cfg);
}

} // namespace finsight::cli
