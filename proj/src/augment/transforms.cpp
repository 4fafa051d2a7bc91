#include "finsight/augment/transforms.hpp"

#include "finsight/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace finsight::augment {

namespace {

std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

/// Bilinear sample; returns false when (x, y) is outside [0, w-1] x [0, h-1].
bool sample_inside(const ImageBuffer& img, double x, double y, int c, double& out) {
    constexpr double eps = 1e-9;
    if (x < -eps || y < -eps || x > img.width() - 1 + eps || y > img.height() - 1 + eps)
        return false;
    x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
    const double bottom = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
    out = top * (1.0 - fy) + bottom * fy;
    return true;
}

double sample_clamped(const ImageBuffer& img, double x, double y, int c) {
    double v = 0.0;
    sample_inside(img, std::clamp(x, 0.0, static_cast<double>(img.width() - 1)),
                  std::clamp(y, 0.0, static_cast<double>(img.height() - 1)), c, v);
    return v;
}

} // namespace

FisheyeParams FisheyeParams::centered(const ImageBuffer& img, double focal_px) {
    return {focal_px, static_cast<double>(img.width() / 2), static_cast<double>(img.height() / 2)};
}

ImageBuffer fisheye_transform(const ImageBuffer& img, const FisheyeParams& p) {
    if (!(p.focal_px > 0.0))
        throw InvalidArgument("fisheye: focal_px must be positive");
    if (p.cx < 0.0 || p.cy < 0.0 || p.cx > img.width() - 1 || p.cy > img.height() - 1)
        throw InvalidArgument("fisheye: centre lies outside the image");

    ImageBuffer out(img.width(), img.height(), img.channels(), 0);
    const double horizon = std::numbers::pi / 2.0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double dx = x - p.cx;
            const double dy = y - p.cy;
            const double r_out = std::hypot(dx, dy);
            double sx = x, sy = y;
            if (r_out > 0.0) {
                const double theta = r_out / p.focal_px;
                if (theta >= horizon)
                    continue;
                const double scale = p.focal_px * std::tan(theta) / r_out;
                sx = p.cx + dx * scale;
                sy = p.cy + dy * scale;
            }
            for (int c = 0; c < img.channels(); ++c) {
                double v;
                if (sample_inside(img, sx, sy, c, v))
                    out.at(x, y, c) = to_u8(v);
            }
        }
    }
    return out;
}

ImageBuffer contrast_adjust(const ImageBuffer& img, double factor) {
    if (!(factor >= 0.0))
        throw InvalidArgument("contrast: factor must be non-negative");
    const int channels = img.channels();
    std::vector<double> mean(static_cast<std::size_t>(channels), 0.0);
    const auto src = img.data();
    for (std::size_t i = 0; i < src.size(); ++i)
        mean[i % static_cast<std::size_t>(channels)] += src[i];
    for (double& m : mean)
        m /= static_cast<double>(img.pixel_count());

    ImageBuffer out = img;
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double m = mean[i % static_cast<std::size_t>(channels)];
        dst[i] = to_u8(m + factor * (src[i] - m));
    }
    return out;
}

ImageBuffer scatter_noise(const ImageBuffer& img, double intensity, std::uint64_t seed) {
    if (!(intensity >= 0.0))
        throw InvalidArgument("noise: intensity must be non-negative");
    if (intensity == 0.0)
        return img;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, intensity);
    ImageBuffer out = img;
    for (auto& v : out.data())
        v = to_u8(v + noise(rng));
    return out;
}

ImageBuffer speckle_noise(const ImageBuffer& img, double intensity, std::uint64_t seed) {
    if (!(intensity >= 0.0))
        throw InvalidArgument("noise: intensity must be non-negative");
    if (intensity == 0.0)
        return img;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, intensity / 128.0);
    ImageBuffer out = img;
    for (auto& v : out.data())
        v = to_u8(v * (1.0 + noise(rng)));
    return out;
}

BlurKernel BlurKernel::box(int length, double direction) {
    if (length < 1)
        throw InvalidArgument("blur: kernel length must be at least 1, got " + std::to_string(length));
    return BlurKernel(std::vector<double>(static_cast<std::size_t>(length), 1.0 / length), direction);
}

BlurKernel::BlurKernel(std::vector<double> weights, double direction)
    : weights_(std::move(weights)), direction_(direction) {
    if (weights_.empty())
        throw InvalidArgument("blur: kernel needs at least one tap");
    const double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidArgument("blur: kernel weights sum to " + std::to_string(sum) + ", expected 1");
    if (!std::isfinite(direction_))
        throw InvalidArgument("blur: direction must be finite");
}

ImageBuffer motion_blur(const ImageBuffer& img, const BlurKernel& k) {
    if (k.length() == 1)
        return img;
    double ux = std::cos(k.direction());
    double uy = std::sin(k.direction());
    // Snap axis-aligned directions so integer taps stay on the pixel grid.
    if (std::abs(ux) < 1e-12)
        ux = 0.0;
    if (std::abs(uy) < 1e-12)
        uy = 0.0;

    ImageBuffer out(img.width(), img.height(), img.channels(), 0);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c) {
                double acc = 0.0;
                for (int t = 0; t < k.length(); ++t) {
                    const double u = k.offset(t);
                    acc += k.weights()[static_cast<std::size_t>(t)] * sample_clamped(img, x - u * ux, y - u * uy, c);
                }
                out.at(x, y, c) = to_u8(acc);
            }
    return out;
}

} // namespace finsight::augment
