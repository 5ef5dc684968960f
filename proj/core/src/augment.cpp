#include "tilda/augment.hpp"

#include <string>

#include "tilda/errors.hpp"

namespace tilda {

void check_image(const ImageTensor& img) {
    if (img.channels < 1 || img.channels > 4) {
        throw DimensionMismatch("image has " + std::to_string(img.channels) +
                                " channels, expected 1..4");
    }
    const std::size_t expected = img.height * img.width * img.channels;
    if (img.data.size() != expected) {
        throw DimensionMismatch("image payload has " +
                                std::to_string(img.data.size()) +
                                " bytes, dimensions require " +
                                std::to_string(expected));
    }
}

ImageTensor hflip(const ImageTensor& img) {
    check_image(img);
    ImageTensor out{img.height, img.width, img.channels, {}};
    out.data.resize(img.data.size());
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const std::size_t src = (y * img.width + (img.width - 1 - x)) *
                                    img.channels;
            const std::size_t dst = (y * img.width + x) * img.channels;
            for (std::size_t ch = 0; ch < img.channels; ++ch) {
                out.data[dst + ch] = img.data[src + ch];
            }
        }
    }
    return out;
}

ImageTensor shift(const ImageTensor& img, int dx, int dy) {
    check_image(img);
    if (dx == 0 && dy == 0) return img;

    ImageTensor out{img.height, img.width, img.channels, {}};
    out.data.assign(img.data.size(), 0);
    for (std::size_t y = 0; y < img.height; ++y) {
        const auto sy = static_cast<std::ptrdiff_t>(y) - dy;
        if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(img.height)) continue;
        for (std::size_t x = 0; x < img.width; ++x) {
            const auto sx = static_cast<std::ptrdiff_t>(x) - dx;
            if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(img.width)) continue;
            const std::size_t src =
                (static_cast<std::size_t>(sy) * img.width +
                 static_cast<std::size_t>(sx)) *
                img.channels;
            const std::size_t dst = (y * img.width + x) * img.channels;
            for (std::size_t ch = 0; ch < img.channels; ++ch) {
                out.data[dst + ch] = img.data[src + ch];
            }
        }
    }
    return out;
}

std::vector<ImageTensor> generate_variants(const ImageTensor& img) {
    check_image(img);
    if (img.height < 2 || img.width < 2) {
        throw DimensionMismatch(
            "variant generation needs images of at least 2x2 pixels, got " +
            std::to_string(img.height) + "x" + std::to_string(img.width));
    }
    std::vector<ImageTensor> out;
    out.reserve(kVariantCount);
    out.push_back(img);
    out.push_back(hflip(img));
    out.push_back(shift(img, -1, 0));
    out.push_back(shift(img, 1, 0));
    out.push_back(shift(img, 0, -1));
    out.push_back(shift(img, 0, 1));
    out.push_back(shift(img, -1, -1));
    out.push_back(shift(img, 1, -1));
    out.push_back(shift(img, -1, 1));
    out.push_back(shift(img, 1, 1));
    return out;
}

} // namespace tilda
