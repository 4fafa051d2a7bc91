#include "finsight/vision/types.hpp"

#include "finsight/common/error.hpp"

namespace finsight::vision {

void validate(const Detection& det, int frame_width, int frame_height) {
    if (det.species.empty())
        throw InvalidArgument("detection species must be non-empty");
    if (!(det.confidence >= 0.0 && det.confidence <= 1.0))
        throw InvalidArgument("detection confidence must lie in [0, 1]");
    const auto& b = det.box;
    if (b.w <= 0 || b.h <= 0)
        throw InvalidArgument("bounding box extents must be positive");
    if (b.x >= frame_width || b.y >= frame_height || b.x + b.w <= 0 || b.y + b.h <= 0)
        throw InvalidArgument("bounding box does not intersect the frame");
}

const char* to_string(CameraModel model) noexcept {
    return model == CameraModel::pinhole ? "pinhole" : "fisheye";
}

CameraModel camera_model_from_string(const std::string& name) {
    if (name == "pinhole")
        return CameraModel::pinhole;
    if (name == "fisheye" || name == "equidistant-fisheye")
        return CameraModel::equidistant_fisheye;
    throw InvalidArgument("unknown camera model '" + name + "'");
}

} // namespace finsight::vision
