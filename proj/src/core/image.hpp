#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace odmtc {

// Grayscale image, row-major, pixel values nominally in [0, 1].
struct Image {
    int rows = 0;
    int cols = 0;
    std::vector<double> pix;

    Image() = default;
    Image(int r, int c) : rows(r), cols(c), pix(static_cast<size_t>(r) * c, 0.0) {}

    double &at(int r, int c) { return pix[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return pix[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return pix.size(); }
};

// Interleaved RGB, row-major, values in [0, 1].
struct RgbImage {
    int rows = 0;
    int cols = 0;
    std::vector<double> pix; // 3 * rows * cols

    double channel(int r, int c, int ch) const {
        return pix[(static_cast<size_t>(r) * cols + c) * 3 + ch];
    }
};

using ImageStack = std::vector<Image>;

// PGM (P2/P5) or PNG by file magic; RGB sources are reduced to BT.601 luma.
Image load_image_gray(const std::string &path);
// PNG only (PGM has no color); errors on grayscale input.
RgbImage load_image_rgb(const std::string &path);

RgbImage load_png_rgb(const std::string &path, bool *was_gray);

void write_pgm(const std::string &path, const Image &img);

Image resize_bilinear(const Image &img, int out_rows, int out_cols);
RgbImage resize_bilinear(const RgbImage &img, int out_rows, int out_cols);

Image rgb_to_gray(const RgbImage &img);

} // namespace odmtc
