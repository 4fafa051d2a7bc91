#include "finsight/vision/detector.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

namespace finsight::vision {

BlobDetector::BlobDetector(Config cfg) : cfg_(std::move(cfg)) {
    if (cfg_.key_color.size() != 1 && cfg_.key_color.size() != 3)
        throw InvalidArgument("blob detector key colour needs 1 or 3 components");
    if (cfg_.tolerance < 0 || cfg_.min_area < 1)
        throw InvalidArgument("blob detector tolerance must be >= 0 and min_area >= 1");
    if (cfg_.species.empty())
        throw InvalidArgument("blob detector species must be non-empty");
}

std::vector<Detection> BlobDetector::detect(std::uint32_t, const augment::ImageBuffer& frame) {
    if (frame.channels() != static_cast<int>(cfg_.key_color.size()))
        throw InvalidArgument("blob detector configured for " + std::to_string(cfg_.key_color.size()) +
                              " channels, frame has " + std::to_string(frame.channels()));
    const int w = frame.width(), h = frame.height();
    std::vector<std::uint8_t> mask(frame.pixel_count(), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool hit = true;
            for (int c = 0; c < frame.channels() && hit; ++c)
                hit = std::abs(frame.at(x, y, c) - cfg_.key_color[static_cast<std::size_t>(c)]) <= cfg_.tolerance;
            mask[static_cast<std::size_t>(y) * w + x] = hit ? 1 : 0;
        }

    std::vector<Detection> out;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (mask[static_cast<std::size_t>(y) * w + x] != 1)
                continue;
            int x0 = x, x1 = x, y0 = y, y1 = y;
            long area = 0;
            stack.assign(1, {x, y});
            mask[static_cast<std::size_t>(y) * w + x] = 2;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                ++area;
                x0 = std::min(x0, cx);
                x1 = std::max(x1, cx);
                y0 = std::min(y0, cy);
                y1 = std::max(y1, cy);
                const int nx[4] = {cx - 1, cx + 1, cx, cx};
                const int ny[4] = {cy, cy, cy - 1, cy + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h)
                        continue;
                    auto& m = mask[static_cast<std::size_t>(ny[k]) * w + nx[k]];
                    if (m == 1) {
                        m = 2;
                        stack.emplace_back(nx[k], ny[k]);
                    }
                }
            }
            if (area >= cfg_.min_area)
                out.push_back({cfg_.species, 1.0, {x0, y0, x1 - x0 + 1, y1 - y0 + 1}});
        }
    return out;
}

Detection detection_from_json(const nlohmann::json& j) {
    try {
        Detection d{j.at("species").get<std::string>(), j.value("confidence", 1.0),
                    {j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()}};
        if (d.species.empty())
            throw SchemaError("species", "must be non-empty");
        if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
            throw SchemaError("confidence", "must lie in [0, 1]");
        if (d.box.w <= 0 || d.box.h <= 0)
            throw SchemaError("w/h", "box extents must be positive");
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("detection", e.what());
    }
}

nlohmann::json detection_to_json(const Detection& d) {
    return {{"species", d.species}, {"confidence", d.confidence}, {"x", d.box.x},
            {"y", d.box.y},         {"w", d.box.w},               {"h", d.box.h}};
}

SidecarDetector SidecarDetector::from_json(const nlohmann::json& doc) {
    if (!doc.is_object())
        throw SchemaError("sidecar", "expected an object mapping frame id to detections");
    std::map<std::uint32_t, std::vector<Detection>> annotations;
    for (const auto& [key, list] : doc.items()) {
        std::uint32_t id = 0;
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(key, &used);
            if (used != key.size() || v > 0xFFFFFFFFul)
                throw std::invalid_argument(key);
            id = static_cast<std::uint32_t>(v);
        } catch (const std::exception&) {
            throw SchemaError("sidecar." + key, "frame id must be an unsigned integer");
        }
        if (!list.is_array())
            throw SchemaError("sidecar." + key, "expected a list of detections");
        auto& dets = annotations[id];
        for (const auto& item : list)
            dets.push_back(detection_from_json(item));
    }
    return SidecarDetector(std::move(annotations));
}

SidecarDetector SidecarDetector::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open sidecar " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
}

std::vector<Detection> SidecarDetector::detect(std::uint32_t frame_id, const augment::ImageBuffer&) {
    const auto it = annotations_.find(frame_id);
    if (it == annotations_.end())
        throw MissingAnnotation(frame_id);
    return it->second;
}

} // namespace finsight::vision
