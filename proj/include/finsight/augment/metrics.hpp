#pragma once

#include "finsight/augment/image.hpp"

#include <cstddef>
#include <vector>

namespace finsight::augment {

// Similarity metrics and near-duplicate reduction. All metrics treat the
// channels of a colour image as one flat set of samples.

/// Sum of squared differences over every pixel and channel. Unnormalized.
double ssd(const ImageBuffer& a, const ImageBuffer& b);

/// ssd divided by width * height * channels.
double mse(const ImageBuffer& a, const ImageBuffer& b);

struct SsimConstants {
    double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    double c2 = (0.03 * 255.0) * (0.03 * 255.0);
};

/// Mean SSIM over non-overlapping `window` x `window` tiles anchored at the
/// origin. Only complete tiles participate; statistics use population variance.
double ssim(const ImageBuffer& a, const ImageBuffer& b, int window = 8, SsimConstants k = {});

struct DedupConfig {
    int patch_size = 16;
    /// Per-pixel (mse-scale) patch distance at or below which a pair is a duplicate.
    double ssd_threshold = 150.0;
    /// SSIM at or above which a pair is a duplicate.
    double ssim_threshold = 0.92;
    int ssim_window = 8;
    SsimConstants ssim_constants{};
};

/// Mean over the patch grid of each patch's mse. Trailing partial patches are
/// kept and normalized by their own pixel count.
double patch_distance(const ImageBuffer& a, const ImageBuffer& b, const DedupConfig& cfg);

struct PairScore {
    std::size_t kept_index;
    std::size_t candidate_index;
    double ssim;
    double patch_distance;
    bool duplicate;
};

struct DedupReport {
    std::vector<std::size_t> kept;
    /// For every dropped image, the first kept image it matched.
    std::vector<PairScore> dropped;
    /// Every comparison performed, in scan order.
    std::vector<PairScore> comparisons;
};

/// Greedy first-seen-kept scan: image j survives iff no already-kept image is
/// a duplicate of it under either metric.
DedupReport dedup_with_report(const std::vector<ImageBuffer>& corpus, const DedupConfig& cfg);

std::vector<std::size_t> dedup(const std::vector<ImageBuffer>& corpus, const DedupConfig& cfg);

} // namespace finsight::augment
