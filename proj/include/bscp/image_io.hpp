#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace bscp {

/// 8-bit single-channel raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Reads an 8/16-bit grayscale (or color, converted to luma) PNG, or a
/// binary PGM (P5). Format is detected from the file signature.
GrayImage read_gray_image(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const GrayImage& image);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

}  // namespace bscp
