#pragma once

#include "finsight/common/error.hpp"
#include "finsight/vision/depth.hpp"
#include "finsight/vision/types.hpp"

#include <vector>

namespace finsight::vision {

/// Raised when a detection cannot be turned into a length; the session
/// reports it as "measurement unavailable".
class MeasurementUnavailable : public Error {
public:
    using Error::Error;
};

/// Minimum fraction of in-box pixels with valid depth.
inline constexpr double kMinDepthCoverage = 0.5;

/// Median of the valid in-box depths (mean of the two middle values for even counts).
double median_box_depth(const BoundingBox& box, const DepthMap& depth);

/// Fish length from the detection's major axis and the median in-box depth.
/// Pinhole: similar triangles. Equidistant fisheye: chord between the view
/// rays through the two major-axis edge midpoints.
LengthEstimate estimate_length(const Detection& det, const DepthMap& depth, const CameraIntrinsics& cam);

/// Depth estimation only runs for frames with at least one detection.
inline bool depth_gate(const std::vector<Detection>& detections) noexcept { return !detections.empty(); }

} // namespace finsight::vision
