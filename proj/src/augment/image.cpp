#include "finsight/augment/image.hpp"

#include "finsight/common/error.hpp"

#include <algorithm>

namespace finsight::augment {

namespace {

void validate_shape(int width, int height, int channels) {
    if (width < 1 || height < 1)
        throw InvalidArgument("image extent must be at least 1x1, got " + std::to_string(width) + "x" +
                              std::to_string(height));
    if (channels != 1 && channels != 3)
        throw InvalidArgument("image channels must be 1 or 3, got " + std::to_string(channels));
}

} // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
    validate_shape(width, height, channels);
    data_.assign(pixel_count() * static_cast<std::size_t>(channels), fill);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    validate_shape(width, height, channels);
    if (data_.size() != pixel_count() * static_cast<std::size_t>(channels))
        throw InvalidArgument("image data length " + std::to_string(data_.size()) + " does not match " +
                              shape_string());
}

std::string ImageBuffer::shape_string() const {
    return std::to_string(width_) + "x" + std::to_string(height_) + "x" + std::to_string(channels_);
}

void ImageBuffer::fill_rect(int x, int y, int w, int h, std::span<const std::uint8_t> color) {
    if (color.size() != static_cast<std::size_t>(channels_))
        throw InvalidArgument("fill color has " + std::to_string(color.size()) + " components for a " +
                              std::to_string(channels_) + "-channel image");
    const int x0 = std::max(x, 0);
    const int y0 = std::max(y, 0);
    const int x1 = std::min(x + w, width_);
    const int y1 = std::min(y + h, height_);
    for (int yy = y0; yy < y1; ++yy)
        for (int xx = x0; xx < x1; ++xx)
            for (int c = 0; c < channels_; ++c)
                at(xx, yy, c) = color[static_cast<std::size_t>(c)];
}

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* op) {
    if (!a.same_shape(b))
        throw InvalidArgument(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                              b.shape_string());
}

} // namespace finsight::augment
