#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace affvqa {

struct GrayRaster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // row-major
};

/// Reads an 8-bit PNG as grayscale (color inputs are converted; 16-bit is
/// narrowed). Throws std::runtime_error on I/O or decode failure.
GrayRaster read_gray_png(const std::string& path);

/// Writes an 8-bit single-channel PNG.
void write_gray_png(const std::string& path, const GrayRaster& raster);

} // namespace affvqa
