#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fakecatcher/common.hpp"

namespace fc {

// 8-bit interleaved RGB raster.
struct ImageU8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // row-major, 3 bytes per pixel

    ImageU8() = default;
    ImageU8(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

    std::uint8_t& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    bool same_dims(const ImageU8& other) const {
        return width == other.width && height == other.height;
    }
};

// PNG / PPM(P6) / PGM(P5) by magic bytes.
ImageU8 load_image(const std::filesystem::path& path);
void save_ppm(const std::filesystem::path& path, const ImageU8& img);
// 8-bit binary PGM (single channel).
void save_pgm(const std::filesystem::path& path, const std::vector<std::uint8_t>& gray, int width,
              int height);
std::vector<std::uint8_t> load_pgm(const std::filesystem::path& path, int& width, int& height);

}  // namespace fc
