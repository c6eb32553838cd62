#include "affvqa/raster_png.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>

namespace affvqa {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

GrayRaster read_gray_png(const std::string& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw std::runtime_error("cannot open PNG: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("PNG decode failed: " + path);
    }

    png_init_io(png, file.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    int color_type = png_get_color_type(png, info);
    if (color_type & PNG_COLOR_MASK_COLOR)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_read_update_info(png, info);

    GrayRaster raster;
    raster.width = static_cast<int>(png_get_image_width(png, info));
    raster.height = static_cast<int>(png_get_image_height(png, info));
    raster.pixels.resize(static_cast<std::size_t>(raster.width) * raster.height);

    std::vector<png_bytep> rows(raster.height);
    for (int y = 0; y < raster.height; ++y)
        rows[y] = raster.pixels.data() + static_cast<std::size_t>(y) * raster.width;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return raster;
}

void write_gray_png(const std::string& path, const GrayRaster& raster) {
    if (raster.width < 1 || raster.height < 1 ||
        raster.pixels.size() != static_cast<std::size_t>(raster.width) * raster.height)
        throw std::invalid_argument("write_gray_png: bad raster");

    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw std::runtime_error("cannot create PNG: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("PNG encode failed: " + path);
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, raster.width, raster.height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_bytep> rows(raster.height);
    for (int y = 0; y < raster.height; ++y)
        rows[y] = const_cast<png_bytep>(raster.pixels.data() +
                                        static_cast<std::size_t>(y) * raster.width);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace affvqa
