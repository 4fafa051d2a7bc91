#pragma once

#include "finsight/augment/image.hpp"

#include <cstdint>
#include <vector>

namespace finsight::augment {

/// Equidistant fisheye remap parameters. `cx`, `cy` are pixel coordinates
/// with pixel centres on integers.
struct FisheyeParams {
    double focal_px;
    double cx;
    double cy;

    /// Centre at (width / 2, height / 2), integer-aligned.
    static FisheyeParams centered(const ImageBuffer& img, double focal_px);
};

/// Output radius r maps to source radius focal * tan(r / focal) along the same
/// polar angle. Bilinear sampling; sources outside the frame (or beyond the
/// 90 degree horizon) become black.
ImageBuffer fisheye_transform(const ImageBuffer& img, const FisheyeParams& p);

/// out = clamp(mean + factor * (in - mean)) with a per-channel mean.
ImageBuffer contrast_adjust(const ImageBuffer& img, double factor);

/// Additive zero-mean Gaussian noise with standard deviation `intensity`
/// (8-bit levels). Deterministic in `seed`.
ImageBuffer scatter_noise(const ImageBuffer& img, double intensity, std::uint64_t seed);

/// Multiplicative alternative to scatter_noise: in * (1 + N(0, intensity / 128)).
ImageBuffer speckle_noise(const ImageBuffer& img, double intensity, std::uint64_t seed);

/// 1D kernel applied along a direction (radians from +x). Tap k sits at
/// offset k - (length - 1) / 2 (integer division), so odd lengths are centred.
class BlurKernel {
public:
    /// Uniform weights.
    static BlurKernel box(int length, double direction);

    /// Weights must sum to 1 within 1e-9.
    BlurKernel(std::vector<double> weights, double direction);

    int length() const noexcept { return static_cast<int>(weights_.size()); }
    double direction() const noexcept { return direction_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    int offset(int tap) const noexcept { return tap - (length() - 1) / 2; }

private:
    std::vector<double> weights_;
    double direction_;
};

/// out(x) = sum_u w(u) * in(x - u * d). Non-integer positions are sampled
/// bilinearly; coordinates past the border are clamped to the edge.
ImageBuffer motion_blur(const ImageBuffer& img, const BlurKernel& k);

} // namespace finsight::augment
