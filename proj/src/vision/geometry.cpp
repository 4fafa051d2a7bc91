#include "finsight/vision/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace finsight::vision {

namespace {

std::vector<double> valid_depths(const BoundingBox& box, const DepthMap& depth) {
    if (box.w <= 0 || box.h <= 0 || box.x < 0 || box.y < 0 || box.x + box.w > depth.width() ||
        box.y + box.h > depth.height())
        throw MeasurementUnavailable("bounding box lies outside the depth map");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(box.area()));
    for (int y = box.y; y < box.y + box.h; ++y)
        for (int x = box.x; x < box.x + box.w; ++x)
            if (DepthMap::valid(depth.at(x, y)))
                values.push_back(depth.at(x, y));
    if (static_cast<double>(values.size()) < kMinDepthCoverage * static_cast<double>(box.area()))
        throw MeasurementUnavailable("only " + std::to_string(values.size()) + " of " +
                                     std::to_string(box.area()) + " box pixels have valid depth");
    return values;
}

std::array<double, 3> view_ray(double px, double py, const CameraIntrinsics& cam) {
    const double dx = px - cam.cx, dy = py - cam.cy;
    const double theta = std::hypot(dx, dy) / cam.focal_px;
    const double phi = std::atan2(dy, dx);
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

} // namespace

double median_box_depth(const BoundingBox& box, const DepthMap& depth) {
    auto values = valid_depths(box, depth);
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1)
        return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

LengthEstimate estimate_length(const Detection& det, const DepthMap& depth, const CameraIntrinsics& cam) {
    if (!(cam.focal_px > 0.0))
        throw InvalidArgument("focal length must be positive");
    const double d = median_box_depth(det.box, depth);
    const auto& b = det.box;

    if (cam.model == CameraModel::pinhole)
        return {100.0 * b.major_axis() * d / cam.focal_px, d, CameraModel::pinhole};

    // Pixel i spans [i - 0.5, i + 0.5], so the box edges sit half a pixel out.
    double ax, ay, bx, by;
    if (b.w >= b.h) {
        ay = by = b.y - 0.5 + b.h / 2.0;
        ax = b.x - 0.5;
        bx = b.x + b.w - 0.5;
    } else {
        ax = bx = b.x - 0.5 + b.w / 2.0;
        ay = b.y - 0.5;
        by = b.y + b.h - 0.5;
    }
    const auto r1 = view_ray(ax, ay, cam);
    const auto r2 = view_ray(bx, by, cam);
    const double chord = std::sqrt((r1[0] - r2[0]) * (r1[0] - r2[0]) + (r1[1] - r2[1]) * (r1[1] - r2[1]) +
                                   (r1[2] - r2[2]) * (r1[2] - r2[2]));
    return {100.0 * d * chord, d, CameraModel::equidistant_fisheye};
}

} // namespace finsight::vision
