#include "skelgen/image.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>

namespace skelgen {

Image Image::filled(int width, int height, int channels, std::uint8_t value) {
    if (width < 1 || height < 1 || (channels != 1 && channels != 3)) {
        throw std::invalid_argument("image: bad dimensions");
    }
    Image img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.pixels.assign(static_cast<std::size_t>(width) * height * channels, value);
    return img;
}

namespace {

// libpng reports errors through longjmp; these helpers keep only trivially
// destructible locals between setjmp and the libpng calls.
bool png_write_raw(std::FILE* fp, const Image& image) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) {
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, info ? &info : nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    for (int y = 0; y < image.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(image.pixels.data() + y * stride));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

struct PngHeader {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int channels = 0;
};

// Two passes through the same file keep allocation out of the jump region.
bool png_read_header(std::FILE* fp, PngHeader* hdr) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) {
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);
    hdr->width = png_get_image_width(png, info);
    hdr->height = png_get_image_height(png, info);
    hdr->channels = png_get_channels(png, info);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

bool png_read_pixels(std::FILE* fp, std::uint8_t* out, std::size_t stride, png_uint_32 rows) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) {
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);
    for (png_uint_32 y = 0; y < rows; ++y) {
        png_read_row(png, out + y * stride, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png(const std::filesystem::path& path, const Image& image) {
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height * image.channels) {
        throw std::invalid_argument("write_png: pixel buffer does not match dimensions");
    }
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) {
        throw std::runtime_error("cannot write " + path.string());
    }
    if (!png_write_raw(fp.get(), image)) {
        throw std::runtime_error("failed to encode PNG " + path.string());
    }
}

Image read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) {
        throw std::runtime_error("cannot open " + path.string());
    }
    PngHeader hdr;
    if (!png_read_header(fp.get(), &hdr)) {
        throw std::runtime_error(path.string() + ": not a readable PNG");
    }
    if (hdr.channels != 1 && hdr.channels != 3) {
        throw std::runtime_error(path.string() + ": unsupported channel count " + std::to_string(hdr.channels));
    }
    Image img = Image::filled(static_cast<int>(hdr.width), static_cast<int>(hdr.height), hdr.channels);
    std::rewind(fp.get());
    if (!png_read_pixels(fp.get(), img.pixels.data(), static_cast<std::size_t>(img.width) * img.channels,
                         hdr.height)) {
        throw std::runtime_error(path.string() + ": corrupt PNG data");
    }
    return img;
}

Matrix channel_plane(const Image& image, int channel) {
    if (channel < 0 || channel >= image.channels) {
        throw std::out_of_range("channel_plane: channel out of range");
    }
    Matrix out(image.height, image.width);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            out(y, x) = image.at(x, y, channel) / 255.0;
        }
    }
    return out;
}

}  // namespace skelgen
