#include "core/encoding.hpp"

#include "core/common.hpp"

#include <algorithm>
#include <cmath>

namespace odmtc {

void BlockSpec::validate() const {
    require(blocks >= 1, ErrorCode::Config, "block count must be >= 1");
    require(overlap >= 0.0 && overlap < 1.0, ErrorCode::Config,
            "overlap ratio must be in [0, 1)");
}

BitMap binarize(const Image &map) {
    BitMap out;
    out.rows = map.rows;
    out.cols = map.cols;
    out.bits.resize(map.size());
    for (size_t i = 0; i < map.size(); ++i)
        out.bits[i] = map.pix[i] > 0.0 ? 1 : 0;
    return out;
}

HashedMap hash_group(std::span<const BitMap> bits) {
    require(!bits.empty(), ErrorCode::Argument, "empty bit-map group");
    HashedMap out;
    out.rows = bits[0].rows;
    out.cols = bits[0].cols;
    out.bit_width = static_cast<int>(bits.size());
    require(out.bit_width <= 31, ErrorCode::Argument, "bit width above 31 is not supported");
    out.val.assign(bits[0].bits.size(), 0);
    for (size_t l = 0; l < bits.size(); ++l) {
        require(bits[l].rows == out.rows && bits[l].cols == out.cols, ErrorCode::Argument,
                "bit maps in a group must share one shape");
        const uint32_t weight = 1u << l;
        for (size_t i = 0; i < out.val.size(); ++i)
            out.val[i] += weight * bits[l].bits[i];
    }
    return out;
}

std::vector<Window> block_windows(int rows, int cols, const BlockSpec &spec) {
    spec.validate();
    require(spec.blocks <= rows * cols, ErrorCode::Config,
            "more blocks than pixels: " + std::to_string(spec.blocks));

    // factorization of A minimizing |a_r - a_c|, preferring a_r <= a_c
    int ar = 1, ac = spec.blocks;
    for (int d = 1; d * d <= spec.blocks; ++d) {
        if (spec.blocks % d == 0) {
            ar = d;
            ac = spec.blocks / d;
        }
    }

    std::vector<Window> out;
    out.reserve(spec.blocks);
    for (int i = 0; i < ar; ++i) {
        const int r0 = static_cast<int>(static_cast<long long>(i) * rows / ar);
        const int r1 = static_cast<int>(static_cast<long long>(i + 1) * rows / ar);
        for (int j = 0; j < ac; ++j) {
            const int c0 = static_cast<int>(static_cast<long long>(j) * cols / ac);
            const int c1 = static_cast<int>(static_cast<long long>(j + 1) * cols / ac);
            const int er = static_cast<int>(std::floor(spec.overlap * (r1 - r0) / 2.0));
            const int ec = static_cast<int>(std::floor(spec.overlap * (c1 - c0) / 2.0));
            Window w;
            w.r0 = std::max(0, r0 - er);
            w.r1 = std::min(rows, r1 + er);
            w.c0 = std::max(0, c0 - ec);
            w.c1 = std::min(cols, c1 + ec);
            out.push_back(w);
        }
    }
    return out;
}

namespace {

// cached ln(k) for k = 1..n; the IQ entry -ln(cnt/wpx) = ln(wpx) - ln(cnt)
// is evaluated by two lookups, which matters when millions of window
// histograms are summarized
const double *log_table(int n) {
    thread_local std::vector<double> table{0.0, 0.0}; // index 0 unused
    while (static_cast<int>(table.size()) <= n)
        table.push_back(std::log(static_cast<double>(table.size())));
    return table.data();
}

} // namespace

Eigen::VectorXd iq_descriptor(std::span<const HashedMap> hashed,
                              const std::vector<Window> &windows) {
    require(!hashed.empty(), ErrorCode::Argument, "no hashed maps");
    require(!windows.empty(), ErrorCode::Argument, "no windows");
    const int bit_width = hashed[0].bit_width;
    const long long bins = 1ll << bit_width;

    int max_pixels = 0;
    for (const Window &w : windows)
        max_pixels = std::max(max_pixels, w.pixel_count());
    const double *ln = log_table(max_pixels);

    Eigen::VectorXd out(bins * static_cast<long long>(windows.size()) *
                        static_cast<long long>(hashed.size()));
    out.setZero();
    std::vector<int> hist(static_cast<size_t>(bins));
    long long offset = 0;
    for (const HashedMap &map : hashed) {
        require(map.bit_width == bit_width, ErrorCode::Argument,
                "hashed maps must share one bit width");
        for (const Window &w : windows) {
            std::fill(hist.begin(), hist.end(), 0);
            for (int r = w.r0; r < w.r1; ++r)
                for (int c = w.c0; c < w.c1; ++c)
                    ++hist[map.val[static_cast<size_t>(r) * map.cols + c]];
            const double ln_pixels = ln[w.pixel_count()];
            for (long long t = 0; t < bins; ++t)
                if (hist[t] > 0)
                    out(offset + t) = ln_pixels - ln[hist[t]];
            offset += bins;
        }
    }
    return out;
}

Eigen::VectorXd fuse_views(const Eigen::VectorXd &o1, const Eigen::VectorXd &o2) {
    require(o1.size() == o2.size(), ErrorCode::Argument,
            "view descriptors have different lengths");
    Eigen::VectorXd out(o1.size() + o2.size());
    out << o1, o2;
    return out;
}

} // namespace odmtc
