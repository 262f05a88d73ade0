#include "tcpd/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

namespace tcpd {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

Image<double> read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng: read struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng: info struct allocation failed");
    }
    std::vector<png_bytep> rows;
    std::vector<png_byte> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const int width = png_get_image_width(png, info);
    const int height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": unsupported channel count " + std::to_string(channels));
    }

    const size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * height);
    rows.resize(height);
    for (int y = 0; y < height; ++y) rows[y] = buffer.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image<double> img(channels, height, width);
    if (bit_depth == 16) {
        for (int y = 0; y < height; ++y) {
            const png_byte* row = rows[y];
            for (int x = 0; x < width; ++x)
                for (int c = 0; c < channels; ++c) {
                    const size_t off = (static_cast<size_t>(x) * channels + c) * 2;
                    const unsigned v = (unsigned(row[off]) << 8) | row[off + 1];  // network order
                    img.at(c, y, x) = v / 65535.0;
                }
        }
    } else if (bit_depth == 8) {
        for (int y = 0; y < height; ++y) {
            const png_byte* row = rows[y];
            for (int x = 0; x < width; ++x)
                for (int c = 0; c < channels; ++c)
                    img.at(c, y, x) = row[static_cast<size_t>(x) * channels + c] / 255.0;
        }
    } else {
        throw IoError(path + ": unsupported bit depth " + std::to_string(bit_depth));
    }
    return img;
}

void write_png(const std::string& path, const Image<double>& img) {
    if (img.channels() != 1 && img.channels() != 3)
        throw InvalidInput("write_png: image must have 1 or 3 channels");
    if (img.empty()) throw InvalidInput("write_png: empty image");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot create " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng: write struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng: info struct allocation failed");
    }
    const int h = img.height(), w = img.width(), ch = img.channels();
    std::vector<png_byte> row(static_cast<size_t>(w) * ch * 2);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, w, h, 16,
                 ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                double v = img.at(c, y, x);
                v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
                const unsigned q = static_cast<unsigned>(v * 65535.0 + 0.5);
                row[(static_cast<size_t>(x) * ch + c) * 2] = static_cast<png_byte>(q >> 8);
                row[(static_cast<size_t>(x) * ch + c) * 2 + 1] = static_cast<png_byte>(q & 0xff);
            }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace tcpd
