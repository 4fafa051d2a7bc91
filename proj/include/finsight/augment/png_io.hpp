#pragma once

#include "finsight/augment/image.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace finsight::augment {

// PNG codec backed by libpng's simplified API. Gray and gray+alpha decode to
// one channel, everything else to RGB; alpha is composited onto black.

std::vector<std::uint8_t> encode_png(const ImageBuffer& img);
ImageBuffer decode_png(std::span<const std::uint8_t> bytes);

ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

} // namespace finsight::augment
