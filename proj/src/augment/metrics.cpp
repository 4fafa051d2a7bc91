#include "finsight/augment/metrics.hpp"

#include "finsight/common/error.hpp"

#include <algorithm>
#include <string>

namespace finsight::augment {

double ssd(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b, "ssd");
    const auto da = a.data();
    const auto db = b.data();
    double total = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double diff = static_cast<double>(da[i]) - static_cast<double>(db[i]);
        total += diff * diff;
    }
    return total;
}

double mse(const ImageBuffer& a, const ImageBuffer& b) {
    return ssd(a, b) / static_cast<double>(a.size());
}

namespace {

double window_ssim(const ImageBuffer& a, const ImageBuffer& b, int x0, int y0, int window,
                   const SsimConstants& k) {
    const int channels = a.channels();
    double sum_a = 0.0, sum_b = 0.0;
    for (int y = y0; y < y0 + window; ++y)
        for (int x = x0; x < x0 + window; ++x)
            for (int c = 0; c < channels; ++c) {
                sum_a += a.at(x, y, c);
                sum_b += b.at(x, y, c);
            }
    const double n = static_cast<double>(window) * window * channels;
    const double mu_a = sum_a / n;
    const double mu_b = sum_b / n;
    double var_a = 0.0, var_b = 0.0, cov = 0.0;
    for (int y = y0; y < y0 + window; ++y)
        for (int x = x0; x < x0 + window; ++x)
            for (int c = 0; c < channels; ++c) {
                const double da = a.at(x, y, c) - mu_a;
                const double db = b.at(x, y, c) - mu_b;
                var_a += da * da;
                var_b += db * db;
                cov += da * db;
            }
    var_a /= n;
    var_b /= n;
    cov /= n;
    const double num = (2.0 * mu_a * mu_b + k.c1) * (2.0 * cov + k.c2);
    const double den = (mu_a * mu_a + mu_b * mu_b + k.c1) * (var_a + var_b + k.c2);
    return num / den;
}

} // namespace

double ssim(const ImageBuffer& a, const ImageBuffer& b, int window, SsimConstants k) {
    require_same_shape(a, b, "ssim");
    if (window < 1)
        throw InvalidArgument("ssim: window must be positive, got " + std::to_string(window));
    if (window > std::min(a.width(), a.height()))
        throw InvalidArgument("ssim: window " + std::to_string(window) + " exceeds image extent " +
                              a.shape_string());
    const int tiles_x = a.width() / window;
    const int tiles_y = a.height() / window;
    double total = 0.0;
    for (int ty = 0; ty < tiles_y; ++ty)
        for (int tx = 0; tx < tiles_x; ++tx)
            total += window_ssim(a, b, tx * window, ty * window, window, k);
    return total / (static_cast<double>(tiles_x) * tiles_y);
}

double patch_distance(const ImageBuffer& a, const ImageBuffer& b, const DedupConfig& cfg) {
    require_same_shape(a, b, "patch_distance");
    if (cfg.patch_size < 1)
        throw InvalidArgument("patch_distance: patch_size must be positive");
    const int p = cfg.patch_size;
    const int channels = a.channels();
    double total = 0.0;
    std::size_t patches = 0;
    for (int y0 = 0; y0 < a.height(); y0 += p) {
        const int y1 = std::min(y0 + p, a.height());
        for (int x0 = 0; x0 < a.width(); x0 += p) {
            const int x1 = std::min(x0 + p, a.width());
            double sum = 0.0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    for (int c = 0; c < channels; ++c) {
                        const double d = static_cast<double>(a.at(x, y, c)) - b.at(x, y, c);
                        sum += d * d;
                    }
            total += sum / (static_cast<double>(x1 - x0) * (y1 - y0) * channels);
            ++patches;
        }
    }
    return total / static_cast<double>(patches);
}

DedupReport dedup_with_report(const std::vector<ImageBuffer>& corpus, const DedupConfig& cfg) {
    if (corpus.empty())
        throw InvalidArgument("dedup: corpus is empty");
    if (cfg.ssd_threshold < 0.0)
        throw InvalidArgument("dedup: ssd_threshold must be non-negative");
    if (cfg.ssim_threshold < 0.0 || cfg.ssim_threshold > 1.0)
        throw InvalidArgument("dedup: ssim_threshold must lie in [0, 1]");
    for (std::size_t i = 1; i < corpus.size(); ++i)
        if (!corpus[i].same_shape(corpus[0]))
            throw InvalidArgument("dedup: image " + std::to_string(i) + " has shape " +
                                  corpus[i].shape_string() + ", expected " + corpus[0].shape_string());

    DedupReport report;
    report.kept.push_back(0);
    for (std::size_t j = 1; j < corpus.size(); ++j) {
        bool duplicate = false;
        for (std::size_t i : report.kept) {
            PairScore score{i, j, ssim(corpus[i], corpus[j], cfg.ssim_window, cfg.ssim_constants),
                            patch_distance(corpus[i], corpus[j], cfg), false};
            score.duplicate = score.ssim >= cfg.ssim_threshold || score.patch_distance <= cfg.ssd_threshold;
            report.comparisons.push_back(score);
            if (score.duplicate) {
                report.dropped.push_back(score);
                duplicate = true;
                break;
            }
        }
        if (!duplicate)
            report.kept.push_back(j);
    }
    return report;
}

std::vector<std::size_t> dedup(const std::vector<ImageBuffer>& corpus, const DedupConfig& cfg) {
    return dedup_with_report(corpus, cfg).kept;
}

} // namespace finsight::augment
