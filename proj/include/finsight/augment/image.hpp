#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace finsight::augment {

/// 8-bit raster, row-major, channel-interleaved. Width and height are at least 1;
/// channels is 1 (gray) or 3 (RGB).
class ImageBuffer {
public:
    ImageBuffer(int width, int height, int channels, std::uint8_t fill = 0);
    ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    std::size_t size() const noexcept { return data_.size(); }

    std::uint8_t& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
    std::uint8_t at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

    std::span<std::uint8_t> data() noexcept { return data_; }
    std::span<const std::uint8_t> data() const noexcept { return data_; }

    bool same_shape(const ImageBuffer& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }
    /// "WxHxC", used in error messages.
    std::string shape_string() const;

    void fill_rect(int x, int y, int w, int h, std::span<const std::uint8_t> color);

    bool operator==(const ImageBuffer&) const = default;

private:
    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(c);
    }

    int width_;
    int height_;
    int channels_;
    std::vector<std::uint8_t> data_;
};

/// Throws InvalidArgument naming both shapes when they differ.
void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* op);

} // namespace finsight::augment
