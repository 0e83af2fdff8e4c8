#include "morphcloud/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include "morphcloud/errors.hpp"

namespace morphcloud {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail_io(const std::string& what, const std::string& path) {
    throw Error(Errc::IoError, what + " '" + path + "'");
}

void write_png(const std::string& path, int width, int height, int color_type,
               int bit_depth, const std::vector<png_bytep>& rows) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail_io("cannot open for writing", path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail_io("png_create_write_struct failed for", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail_io("png_create_info_struct failed for", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail_io("libpng error while writing", path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png); // rows are host little-endian
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<uint8_t> data; // row-major, host little-endian for 16-bit
};

PngImage read_png(const std::string& path, int want_channels, int want_depth) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw Error(Errc::MissingFile, "cannot open '" + path + "'");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail_io("png_create_read_struct failed for", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail_io("png_create_info_struct failed for", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail_io("libpng error while reading", path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (want_channels == 3 && (color_type == PNG_COLOR_TYPE_GRAY ||
                               color_type == PNG_COLOR_TYPE_GRAY_ALPHA))
        png_set_gray_to_rgb(png);
    if (want_channels == 1 && (color_type == PNG_COLOR_TYPE_RGB ||
                               color_type == PNG_COLOR_TYPE_RGB_ALPHA ||
                               color_type == PNG_COLOR_TYPE_PALETTE))
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (want_depth == 8 && bit_depth == 16) png_set_strip_16(png);
    if (want_depth == 16 && bit_depth == 16) png_set_swap(png);
    png_read_update_info(png, info);

    PngImage img;
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.channels = static_cast<int>(png_get_channels(png, info));
    img.bit_depth = static_cast<int>(png_get_bit_depth(png, info));
    size_t rowbytes = png_get_rowbytes(png, info);
    img.data.resize(rowbytes * static_cast<size_t>(img.height));
    std::vector<png_bytep> rows(static_cast<size_t>(img.height));
    for (int y = 0; y < img.height; ++y) rows[static_cast<size_t>(y)] = img.data.data() + rowbytes * static_cast<size_t>(y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (img.channels != want_channels || img.bit_depth != want_depth)
        throw Error(Errc::IoError, "unexpected PNG layout in '" + path + "'");
    return img;
}

} // namespace

void write_png_rgb(const ImageRgb& img, const std::string& path) {
    std::vector<png_bytep> rows(static_cast<size_t>(img.height));
    for (int y = 0; y < img.height; ++y)
        rows[static_cast<size_t>(y)] = reinterpret_cast<png_bytep>(
            const_cast<Rgb*>(&img.at(0, y)));
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 8, rows);
}

ImageRgb read_png_rgb(const std::string& path) {
    PngImage raw = read_png(path, 3, 8);
    ImageRgb img(raw.width, raw.height);
    for (int y = 0; y < raw.height; ++y)
        for (int x = 0; x < raw.width; ++x) {
            const uint8_t* p = raw.data.data() + (static_cast<size_t>(y) * raw.width + x) * 3;
            img.at(x, y) = Rgb{p[0], p[1], p[2]};
        }
    return img;
}

void write_png_depth(const MapF32& depth, double depth_near, double depth_far,
                     const std::string& path) {
    if (!(depth_far > depth_near))
        throw Error(Errc::InvalidArgument, "depth_far must exceed depth_near");
    double span = depth_far - depth_near;
    std::vector<uint16_t> q(depth.pixels());
    for (size_t i = 0; i < depth.pixels(); ++i) {
        double t = (static_cast<double>(depth.data[i]) - depth_near) / span;
        long v = std::lround(t * 65535.0);
        if (v < 0) v = 0;
        if (v > 65535) v = 65535;
        q[i] = static_cast<uint16_t>(v);
    }
    std::vector<png_bytep> rows(static_cast<size_t>(depth.height));
    for (int y = 0; y < depth.height; ++y)
        rows[static_cast<size_t>(y)] =
            reinterpret_cast<png_bytep>(q.data() + static_cast<size_t>(y) * depth.width);
    write_png(path, depth.width, depth.height, PNG_COLOR_TYPE_GRAY, 16, rows);

    std::ofstream side(path + ".range");
    if (!side) fail_io("cannot write depth range sidecar for", path);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", depth_near, depth_far);
    side << buf;
}

MapF32 read_png_depth(const std::string& path, double* depth_near, double* depth_far) {
    std::ifstream side(path + ".range");
    if (!side) throw Error(Errc::MissingFile, "missing depth range sidecar '" + path + ".range'");
    double lo = 0.0, hi = 0.0;
    if (!(side >> lo >> hi) || !(hi > lo))
        throw Error(Errc::IoError, "bad depth range sidecar for '" + path + "'");

    PngImage raw = read_png(path, 1, 16);
    MapF32 depth(raw.width, raw.height);
    const uint16_t* q = reinterpret_cast<const uint16_t*>(raw.data.data());
    for (size_t i = 0; i < depth.pixels(); ++i)
        depth.data[i] = static_cast<float>(lo + (hi - lo) * (q[i] / 65535.0));
    if (depth_near) *depth_near = lo;
    if (depth_far) *depth_far = hi;
    return depth;
}

void write_png_mask(const MaskU8& mask, const std::string& path) {
    std::vector<uint8_t> bytes(mask.pixels());
    for (size_t i = 0; i < mask.pixels(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
    std::vector<png_bytep> rows(static_cast<size_t>(mask.height));
    for (int y = 0; y < mask.height; ++y)
        rows[static_cast<size_t>(y)] = bytes.data() + static_cast<size_t>(y) * mask.width;
    write_png(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, 8, rows);
}

MaskU8 read_png_mask(const std::string& path) {
    PngImage raw = read_png(path, 1, 8);
    MaskU8 mask(raw.width, raw.height);
    for (size_t i = 0; i < mask.pixels(); ++i) mask.data[i] = raw.data[i] ? 1 : 0;
    return mask;
}

} // namespace morphcloud
