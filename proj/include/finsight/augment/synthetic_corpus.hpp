#pragma once

#include "finsight/augment/image.hpp"

#include <cstdint>
#include <vector>

namespace finsight::augment {

/// Stand-in for a scraped photo corpus: every unique scene is followed by
/// noisy, slightly re-contrasted near copies of itself.
struct CorpusSpec {
    int uniques = 20;
    /// Images per unique scene, the clean original included.
    int variants = 7;
    int size = 128;
    int channels = 3;
    double noise_sigma = 6.0;
    double contrast_jitter = 0.05;
    std::uint64_t seed = 0;
};

/// Random background gradient with a handful of rectangles and ellipses.
ImageBuffer make_scene(int size, int channels, std::uint64_t seed);

std::vector<ImageBuffer> make_dedup_corpus(const CorpusSpec& spec);

} // namespace finsight::augment
