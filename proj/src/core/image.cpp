#include "core/image.hpp"

#include "core/common.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace odmtc {

namespace {

int pnm_next_int(std::istream &in, const std::string &path) {
    // skips whitespace and '#' comments per the PNM grammar
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n')
                c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    require(c != EOF, ErrorCode::Io, "truncated PNM header: " + path);
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    require(any, ErrorCode::Io, "malformed PNM header: " + path);
    return value;
}

Image load_pgm(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open image: " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    require(magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5'), ErrorCode::Io,
            "not a PGM file: " + path);
    const bool binary = magic[1] == '5';
    const int cols = pnm_next_int(in, path);
    const int rows = pnm_next_int(in, path);
    const int maxval = pnm_next_int(in, path);
    require(rows > 0 && cols > 0 && maxval > 0 && maxval < 65536, ErrorCode::Io,
            "bad PGM dimensions: " + path);
    Image img(rows, cols);
    const double scale = 1.0 / maxval;
    const size_t n = img.size();
    if (binary) {
        if (maxval < 256) {
            std::vector<uint8_t> buf(n);
            in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(n));
            require(static_cast<size_t>(in.gcount()) == n, ErrorCode::Io,
                    "truncated PGM data: " + path);
            for (size_t i = 0; i < n; ++i)
                img.pix[i] = buf[i] * scale;
        } else {
            std::vector<uint8_t> buf(2 * n);
            in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(2 * n));
            require(static_cast<size_t>(in.gcount()) == 2 * n, ErrorCode::Io,
                    "truncated PGM data: " + path);
            for (size_t i = 0; i < n; ++i)
                img.pix[i] = ((buf[2 * i] << 8) | buf[2 * i + 1]) * scale; // big-endian per spec
        }
    } else {
        for (size_t i = 0; i < n; ++i)
            img.pix[i] = pnm_next_int(in, path) * scale;
    }
    return img;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE *fp = nullptr;
    ~PngReader() {
        if (png)
            png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp)
            std::fclose(fp);
    }
};

} // namespace

RgbImage load_png_rgb(const std::string &path, bool *was_gray) {
    PngReader r;
    r.fp = std::fopen(path.c_str(), "rb");
    require(r.fp != nullptr, ErrorCode::Io, "cannot open image: " + path);
    uint8_t sig[8];
    require(std::fread(sig, 1, 8, r.fp) == 8 && png_sig_cmp(sig, 0, 8) == 0, ErrorCode::Io,
            "not a PNG file: " + path);
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    require(r.png != nullptr, ErrorCode::Internal, "libpng init failed");
    r.info = png_create_info_struct(r.png);
    require(r.info != nullptr, ErrorCode::Internal, "libpng init failed");
    if (setjmp(png_jmpbuf(r.png)))
        fail(ErrorCode::Io, "corrupt PNG file: " + path);
    png_init_io(r.png, r.fp);
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    const png_uint_32 w = png_get_image_width(r.png, r.info);
    const png_uint_32 h = png_get_image_height(r.png, r.info);
    const int color = png_get_color_type(r.png, r.info);
    const int depth = png_get_bit_depth(r.png, r.info);
    if (was_gray)
        *was_gray = (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA);

    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(r.png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(r.png);
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(r.png);
    png_set_strip_alpha(r.png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(r.png);
    png_read_update_info(r.png, r.info);

    const int out_depth = png_get_bit_depth(r.png, r.info);
    const size_t rowbytes = png_get_rowbytes(r.png, r.info);
    std::vector<uint8_t> data(rowbytes * h);
    std::vector<png_bytep> rowptrs(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rowptrs[y] = data.data() + y * rowbytes;
    png_read_image(r.png, rowptrs.data());

    RgbImage img;
    img.rows = static_cast<int>(h);
    img.cols = static_cast<int>(w);
    img.pix.resize(static_cast<size_t>(h) * w * 3);
    if (out_depth == 8) {
        const double scale = 1.0 / 255.0;
        for (size_t i = 0; i < img.pix.size(); ++i)
            img.pix[i] = data[i] * scale;
    } else { // 16-bit, big-endian
        const double scale = 1.0 / 65535.0;
        for (size_t i = 0; i < img.pix.size(); ++i)
            img.pix[i] = ((data[2 * i] << 8) | data[2 * i + 1]) * scale;
    }
    return img;
}

Image rgb_to_gray(const RgbImage &img) {
    Image out(img.rows, img.cols);
    const size_t n = out.size();
    for (size_t i = 0; i < n; ++i) {
        const double *p = &img.pix[3 * i];
        out.pix[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return out;
}

Image load_image_gray(const std::string &path) {
    std::ifstream probe(path, std::ios::binary);
    require(probe.good(), ErrorCode::Io, "cannot open image: " + path);
    char magic[2] = {0, 0};
    probe.read(magic, 2);
    probe.close();
    if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5'))
        return load_pgm(path);
    return rgb_to_gray(load_png_rgb(path, nullptr));
}

RgbImage load_image_rgb(const std::string &path) {
    std::ifstream probe(path, std::ios::binary);
    require(probe.good(), ErrorCode::Io, "cannot open image: " + path);
    char magic[2] = {0, 0};
    probe.read(magic, 2);
    probe.close();
    require(!(magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')), ErrorCode::Data,
            "PGM is grayscale; an RGB image is required: " + path);
    bool was_gray = false;
    RgbImage img = load_png_rgb(path, &was_gray);
    require(!was_gray, ErrorCode::Data, "grayscale image where RGB is required: " + path);
    return img;
}

void write_pgm(const std::string &path, const Image &img) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::Io, "cannot write image: " + path);
    out << "P5\n" << img.cols << " " << img.rows << "\n255\n";
    std::vector<uint8_t> buf(img.size());
    for (size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.pix[i], 0.0, 1.0);
        buf[i] = static_cast<uint8_t>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
    require(out.good(), ErrorCode::Io, "write failed: " + path);
}

namespace {

// sample with clamped edges at fractional position (fy, fx)
inline double bilinear_at(const double *p, int rows, int cols, int stride, double fy, double fx) {
    const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, rows - 1);
    const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, cols - 1);
    const int y1 = std::min(y0 + 1, rows - 1);
    const int x1 = std::min(x0 + 1, cols - 1);
    const double dy = std::clamp(fy - y0, 0.0, 1.0);
    const double dx = std::clamp(fx - x0, 0.0, 1.0);
    const double a = p[(static_cast<size_t>(y0) * cols + x0) * stride];
    const double b = p[(static_cast<size_t>(y0) * cols + x1) * stride];
    const double c = p[(static_cast<size_t>(y1) * cols + x0) * stride];
    const double d = p[(static_cast<size_t>(y1) * cols + x1) * stride];
    return a * (1 - dy) * (1 - dx) + b * (1 - dy) * dx + c * dy * (1 - dx) + d * dy * dx;
}

} // namespace

Image resize_bilinear(const Image &img, int out_rows, int out_cols) {
    require(out_rows > 0 && out_cols > 0, ErrorCode::Argument, "resize target must be positive");
    if (out_rows == img.rows && out_cols == img.cols)
        return img;
    Image out(out_rows, out_cols);
    const double sy = static_cast<double>(img.rows) / out_rows;
    const double sx = static_cast<double>(img.cols) / out_cols;
    for (int r = 0; r < out_rows; ++r) {
        const double fy = (r + 0.5) * sy - 0.5;
        for (int c = 0; c < out_cols; ++c) {
            const double fx = (c + 0.5) * sx - 0.5;
            out.at(r, c) = bilinear_at(img.pix.data(), img.rows, img.cols, 1, fy, fx);
        }
    }
    return out;
}

RgbImage resize_bilinear(const RgbImage &img, int out_rows, int out_cols) {
    require(out_rows > 0 && out_cols > 0, ErrorCode::Argument, "resize target must be positive");
    if (out_rows == img.rows && out_cols == img.cols)
        return img;
    RgbImage out;
    out.rows = out_rows;
    out.cols = out_cols;
    out.pix.resize(static_cast<size_t>(out_rows) * out_cols * 3);
    const double sy = static_cast<double>(img.rows) / out_rows;
    const double sx = static_cast<double>(img.cols) / out_cols;
    for (int r = 0; r < out_rows; ++r) {
        const double fy = (r + 0.5) * sy - 0.5;
        for (int c = 0; c < out_cols; ++c) {
            const double fx = (c + 0.5) * sx - 0.5;
            for (int ch = 0; ch < 3; ++ch)
                out.pix[(static_cast<size_t>(r) * out_cols + c) * 3 + ch] =
                    bilinear_at(img.pix.data() + ch, img.rows, img.cols, 3, fy, fx);
        }
    }
    return out;
}

} // namespace odmtc
