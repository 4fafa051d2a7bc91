#pragma once

#include <string>
#include <vector>

namespace finsight::vision {

/// Pixel rectangle, top-left anchored. Covers columns [x, x + w) and rows [y, y + h).
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 1;
    int h = 1;

    long area() const noexcept { return static_cast<long>(w) * h; }
    int major_axis() const noexcept { return w > h ? w : h; }
    bool operator==(const BoundingBox&) const = default;
};

struct Detection {
    std::string species;
    double confidence = 1.0;
    BoundingBox box;

    bool operator==(const Detection&) const = default;
};

/// Throws InvalidArgument unless w, h > 0, the box intersects a width x height
/// frame, species is non-empty and 0 <= confidence <= 1.
void validate(const Detection& det, int frame_width, int frame_height);

enum class CameraModel { pinhole, equidistant_fisheye };

const char* to_string(CameraModel model) noexcept;
CameraModel camera_model_from_string(const std::string& name);

struct CameraIntrinsics {
    double focal_px = 800.0;
    double cx = 0.0;
    double cy = 0.0;
    CameraModel model = CameraModel::pinhole;
};

struct LengthEstimate {
    double length_cm = 0.0;
    double depth_used_m = 0.0;
    CameraModel method = CameraModel::pinhole;

    bool operator==(const LengthEstimate&) const = default;
};

} // namespace finsight::vision
