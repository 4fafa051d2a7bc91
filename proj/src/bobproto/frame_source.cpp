#include "finsight/bobproto/frame_source.hpp"

#include "finsight/augment/png_io.hpp"
#include "finsight/common/error.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

namespace finsight::bobproto {

SyntheticSceneSource::SyntheticSceneSource(Config cfg) : cfg_(std::move(cfg)) {
    if (cfg_.period > 0 && cfg_.visible > cfg_.period)
        throw InvalidArgument("visible frames exceed the period");
    with_fish_ = augment::encode_png(
        vision::render_scene(cfg_.scene, cfg_.width, cfg_.height, cfg_.background, cfg_.key_color));
    empty_ = augment::encode_png(
        vision::render_scene(vision::SceneSpec{cfg_.scene.far_m, {}}, cfg_.width, cfg_.height,
                             cfg_.background, cfg_.key_color));
}

const Bytes& SyntheticSceneSource::png(std::uint64_t index) {
    if (cfg_.period == 0)
        return with_fish_;
    return index % cfg_.period < cfg_.visible ? with_fish_ : empty_;
}

DirectorySource::DirectorySource(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path());
    if (ec)
        throw IoError("cannot list " + dir.string() + ": " + ec.message());
    if (files.empty())
        throw InvalidArgument("no .png frames in " + dir.string());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in)
            throw IoError("cannot read " + f.string());
        Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        augment::decode_png(bytes);  // reject non-PNG files up front
        frames_.push_back(std::move(bytes));
    }
}

const Bytes& DirectorySource::png(std::uint64_t index) {
    return frames_[index % frames_.size()];
}

} // namespace finsight::bobproto
