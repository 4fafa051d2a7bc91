#pragma once

#include "finsight/augment/image.hpp"
#include "finsight/common/error.hpp"
#include "finsight/vision/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace finsight::vision {

class Detector {
public:
    virtual ~Detector() = default;
    virtual std::vector<Detection> detect(std::uint32_t frame_id, const augment::ImageBuffer& frame) = 0;
};

/// Thresholds a key colour and reports one box per 4-connected component.
class BlobDetector final : public Detector {
public:
    struct Config {
        std::vector<std::uint8_t> key_color{255, 128, 0};
        /// Maximum per-channel absolute difference from key_color.
        int tolerance = 0;
        std::string species = "fish";
        /// Components smaller than this many pixels are ignored.
        int min_area = 1;
    };

    explicit BlobDetector(Config cfg);
    std::vector<Detection> detect(std::uint32_t frame_id, const augment::ImageBuffer& frame) override;

private:
    Config cfg_;
};

class MissingAnnotation : public Error {
public:
    explicit MissingAnnotation(std::uint32_t frame_id)
        : Error("no sidecar annotation for frame " + std::to_string(frame_id)), frame_id_(frame_id) {}
    std::uint32_t frame_id() const noexcept { return frame_id_; }

private:
    std::uint32_t frame_id_;
};

/// Replays ground-truth annotations keyed by frame id.
class SidecarDetector final : public Detector {
public:
    explicit SidecarDetector(std::map<std::uint32_t, std::vector<Detection>> annotations)
        : annotations_(std::move(annotations)) {}

    static SidecarDetector from_json(const nlohmann::json& doc);
    static SidecarDetector load(const std::filesystem::path& path);

    std::vector<Detection> detect(std::uint32_t frame_id, const augment::ImageBuffer& frame) override;

private:
    std::map<std::uint32_t, std::vector<Detection>> annotations_;
};

Detection detection_from_json(const nlohmann::json& j);
nlohmann::json detection_to_json(const Detection& d);

} // namespace finsight::vision
