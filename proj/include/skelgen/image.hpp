#pragma once

#include "skelgen/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace skelgen {

// 8-bit interleaved raster, row-major.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 3;
    std::vector<std::uint8_t> pixels;

    static Image filled(int width, int height, int channels, std::uint8_t value = 0);

    std::uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool operator==(const Image&) const = default;
};

// Gray or RGB PNG (8-bit).
void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

// One channel as doubles in [0, 1], height x width.
Matrix channel_plane(const Image& image, int channel);

}  // namespace skelgen
