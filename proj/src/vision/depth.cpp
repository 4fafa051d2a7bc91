#include "finsight/vision/depth.hpp"

#include "finsight/common/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace finsight::vision {

DepthMap::DepthMap(int width, int height, double fill) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw InvalidArgument("depth map extent must be at least 1x1");
    depth_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

namespace {

BoundingBox box_from_json(const nlohmann::json& j, const std::string& where) {
    try {
        BoundingBox b{j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()};
        if (b.w <= 0 || b.h <= 0)
            throw SchemaError(where, "box extents must be positive");
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(where, e.what());
    }
}

} // namespace

SceneSpec scene_from_json(const nlohmann::json& doc) {
    SceneSpec scene;
    try {
        scene.far_m = doc.value("far_m", 5.0);
        if (!(scene.far_m > 0.0))
            throw SchemaError("far_m", "must be positive");
        if (doc.contains("objects")) {
            std::size_t i = 0;
            for (const auto& obj : doc.at("objects")) {
                const std::string where = "objects[" + std::to_string(i++) + "]";
                SceneObject o{obj.value("species", std::string("fish")), obj.at("depth_m").get<double>(),
                              box_from_json(obj.at("box"), where + ".box")};
                if (!(o.depth_m > 0.0))
                    throw SchemaError(where + ".depth_m", "must be positive");
                scene.objects.push_back(std::move(o));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("scene", e.what());
    }
    return scene;
}

nlohmann::json scene_to_json(const SceneSpec& scene) {
    nlohmann::json objects = nlohmann::json::array();
    for (const auto& o : scene.objects)
        objects.push_back({{"species", o.species},
                           {"depth_m", o.depth_m},
                           {"box", {{"x", o.box.x}, {"y", o.box.y}, {"w", o.box.w}, {"h", o.box.h}}}});
    return {{"far_m", scene.far_m}, {"objects", objects}};
}

SceneSpec load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open scene " + path.string());
    try {
        return scene_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
}

DepthMap depth_for(const augment::ImageBuffer& frame, const SceneSpec& scene) {
    DepthMap map(frame.width(), frame.height(), scene.far_m);
    for (const auto& obj : scene.objects) {
        const int x0 = std::max(obj.box.x, 0), y0 = std::max(obj.box.y, 0);
        const int x1 = std::min(obj.box.x + obj.box.w, frame.width());
        const int y1 = std::min(obj.box.y + obj.box.h, frame.height());
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                map.at(x, y) = std::min(map.at(x, y), obj.depth_m);
    }
    return map;
}

augment::ImageBuffer render_scene(const SceneSpec& scene, int width, int height,
                                  const std::vector<std::uint8_t>& background,
                                  const std::vector<std::uint8_t>& key_color) {
    const int channels = static_cast<int>(background.size());
    if (key_color.size() != background.size())
        throw InvalidArgument("render_scene: key colour and background differ in channel count");
    augment::ImageBuffer img(width, height, channels);
    img.fill_rect(0, 0, width, height, background);
    std::vector<std::size_t> order(scene.objects.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scene.objects[a].depth_m > scene.objects[b].depth_m;
    });
    for (std::size_t i : order) {
        const auto& b = scene.objects[i].box;
        img.fill_rect(b.x, b.y, b.w, b.h, key_color);
    }
    return img;
}

DepthMap SceneDepthProvider::depth_for(std::uint32_t, const augment::ImageBuffer& frame) {
    return vision::depth_for(frame, scene_);
}

ConstantDepthProvider::ConstantDepthProvider(double depth_m) : depth_m_(depth_m) {
    if (!(depth_m > 0.0) || !std::isfinite(depth_m))
        throw InvalidArgument("constant depth must be positive");
}

DepthMap ConstantDepthProvider::depth_for(std::uint32_t, const augment::ImageBuffer& frame) {
    return DepthMap(frame.width(), frame.height(), depth_m_);
}

} // namespace finsight::vision
