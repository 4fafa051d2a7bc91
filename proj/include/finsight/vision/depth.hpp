#pragma once

#include "finsight/augment/image.hpp"
#include "finsight/vision/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace finsight::vision {

/// Per-pixel metric depth. 0 marks an invalid sample.
class DepthMap {
public:
    DepthMap(int width, int height, double fill);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double& at(int x, int y) noexcept { return depth_[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int x, int y) const noexcept { return depth_[static_cast<std::size_t>(y) * width_ + x]; }

    static bool valid(double d) noexcept { return d > 0.0 && d < 1e300; }

private:
    int width_;
    int height_;
    std::vector<double> depth_;
};

/// A fronto-parallel planar object at a known distance.
struct SceneObject {
    std::string species;
    double depth_m;
    BoundingBox box;
};

struct SceneSpec {
    double far_m = 5.0;
    std::vector<SceneObject> objects;
};

SceneSpec scene_from_json(const nlohmann::json& doc);
nlohmann::json scene_to_json(const SceneSpec& scene);
SceneSpec load_scene(const std::filesystem::path& path);

/// Renders the scene's depth at the frame's resolution: every pixel takes the
/// nearest covering object, or far_m.
DepthMap depth_for(const augment::ImageBuffer& frame, const SceneSpec& scene);

/// Paints each object's box in `key_color` over `background`, farthest first.
augment::ImageBuffer render_scene(const SceneSpec& scene, int width, int height,
                                  const std::vector<std::uint8_t>& background,
                                  const std::vector<std::uint8_t>& key_color);

/// Source of depth maps for frames that contain a detection.
class DepthProvider {
public:
    virtual ~DepthProvider() = default;
    virtual DepthMap depth_for(std::uint32_t frame_id, const augment::ImageBuffer& frame) = 0;
};

class SceneDepthProvider final : public DepthProvider {
public:
    explicit SceneDepthProvider(SceneSpec scene) : scene_(std::move(scene)) {}
    DepthMap depth_for(std::uint32_t frame_id, const augment::ImageBuffer& frame) override;

private:
    SceneSpec scene_;
};

/// Every pixel at the same distance; for rigs with a fixed viewing distance.
class ConstantDepthProvider final : public DepthProvider {
public:
    explicit ConstantDepthProvider(double depth_m);
    DepthMap depth_for(std::uint32_t frame_id, const augment::ImageBuffer& frame) override;

private:
    double depth_m_;
};

} // namespace finsight::vision
