#include "finsight/augment/synthetic_corpus.hpp"

#include "finsight/augment/transforms.hpp"
#include "finsight/common/error.hpp"

#include <array>
#include <random>

namespace finsight::augment {

ImageBuffer make_scene(int size, int channels, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> level(0, 255);
    std::uniform_int_distribution<int> coord(0, size - 1);
    std::uniform_int_distribution<int> extent(size / 8, size / 2);

    ImageBuffer img(size, size, channels);
    std::array<int, 3> top{}, bottom{};
    for (int c = 0; c < channels; ++c) {
        top[static_cast<std::size_t>(c)] = level(rng);
        bottom[static_cast<std::size_t>(c)] = level(rng);
    }
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < channels; ++c) {
                const auto i = static_cast<std::size_t>(c);
                img.at(x, y, c) = static_cast<std::uint8_t>(top[i] + (bottom[i] - top[i]) * y / size);
            }

    const int shapes = 6;
    for (int s = 0; s < shapes; ++s) {
        const int cx = coord(rng), cy = coord(rng);
        const int rx = extent(rng) / 2, ry = extent(rng) / 2;
        const bool ellipse = (s % 2) == 1;
        std::array<std::uint8_t, 3> color{};
        for (int c = 0; c < channels; ++c)
            color[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(level(rng));
        for (int y = cy - ry; y <= cy + ry; ++y)
            for (int x = cx - rx; x <= cx + rx; ++x) {
                if (x < 0 || y < 0 || x >= size || y >= size)
                    continue;
                if (ellipse) {
                    const double nx = static_cast<double>(x - cx) / (rx + 1);
                    const double ny = static_cast<double>(y - cy) / (ry + 1);
                    if (nx * nx + ny * ny > 1.0)
                        continue;
                }
                for (int c = 0; c < channels; ++c)
                    img.at(x, y, c) = color[static_cast<std::size_t>(c)];
            }
    }
    return img;
}

std::vector<ImageBuffer> make_dedup_corpus(const CorpusSpec& spec) {
    if (spec.uniques < 1 || spec.variants < 1 || spec.size < 8)
        throw InvalidArgument("corpus spec needs uniques >= 1, variants >= 1, size >= 8");
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> jitter(1.0 - spec.contrast_jitter, 1.0 + spec.contrast_jitter);

    std::vector<ImageBuffer> corpus;
    corpus.reserve(static_cast<std::size_t>(spec.uniques) * static_cast<std::size_t>(spec.variants));
    for (int u = 0; u < spec.uniques; ++u) {
        const ImageBuffer base = make_scene(spec.size, spec.channels, rng());
        corpus.push_back(base);
        for (int v = 1; v < spec.variants; ++v) {
            const double factor = jitter(rng);
            corpus.push_back(scatter_noise(contrast_adjust(base, factor), spec.noise_sigma, rng()));
        }
    }
    return corpus;
}

} // namespace finsight::augment
