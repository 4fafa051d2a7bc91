#pragma once

#include "finsight/bobproto/codec.hpp"
#include "finsight/vision/depth.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace finsight::bobproto {

/// PNG frames by index. Sources cache their encodings so long simulated runs
/// do not re-encode the same image.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual const Bytes& png(std::uint64_t index) = 0;
};

/// Renders a scene with a key-coloured fish. Within every `period` frames the
/// fish is visible for the first `visible` frames; period 0 keeps it always on.
class SyntheticSceneSource final : public FrameSource {
public:
    struct Config {
        vision::SceneSpec scene;
        int width = 64;
        int height = 48;
        std::vector<std::uint8_t> background{20, 60, 90};
        std::vector<std::uint8_t> key_color{255, 128, 0};
        std::uint64_t period = 0;
        std::uint64_t visible = 0;
    };

    explicit SyntheticSceneSource(Config cfg);
    const Bytes& png(std::uint64_t index) override;

private:
    Config cfg_;
    Bytes with_fish_;
    Bytes empty_;
};

/// Cycles through the *.png files of a directory in lexical order.
class DirectorySource final : public FrameSource {
public:
    explicit DirectorySource(const std::filesystem::path& dir);
    const Bytes& png(std::uint64_t index) override;
    std::size_t size() const noexcept { return frames_.size(); }

private:
    std::vector<Bytes> frames_;
};

} // namespace finsight::bobproto
