#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tilda {

/// An 8-bit image, row-major with interleaved channels:
/// data[(y * width + x) * channels + ch].
struct ImageTensor {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<std::uint8_t> data;

    std::uint8_t at(std::size_t x, std::size_t y, std::size_t ch) const {
        return data[(y * width + x) * channels + ch];
    }

    bool operator==(const ImageTensor&) const = default;
};

/// Throws DimensionMismatch unless channels is 1..4 and the payload length
/// matches height * width * channels.
void check_image(const ImageTensor& img);

/// Mirrors the image left-right: output column j = input column width-1-j.
ImageTensor hflip(const ImageTensor& img);

/// Translates the image by (dx, dy) pixels, dx/dy in {-1, 0, 1}; positive
/// dx moves content right, positive dy moves it down. Vacated border
/// pixels are zero-filled.
ImageTensor shift(const ImageTensor& img, int dx, int dy);

/// The ten prediction-time variants of an image, in fixed order:
///   0 original, 1 horizontal flip,
///   2 left, 3 right, 4 up, 5 down,
///   6 up-left, 7 up-right, 8 down-left, 9 down-right.
/// Requires height >= 2 and width >= 2 so every one-pixel shift keeps
/// image content inside the frame.
std::vector<ImageTensor> generate_variants(const ImageTensor& img);

inline constexpr std::size_t kVariantCount = 10;

} // namespace tilda
