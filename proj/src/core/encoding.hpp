#pragma once

#include "core/image.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace odmtc {

struct BitMap {
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> bits; // row-major, 0 or 1
};

// Integer-valued "image": each pixel packs the binarized outputs of the
// final layer's filters, so values lie in [0, 2^bit_width - 1].
struct HashedMap {
    int rows = 0;
    int cols = 0;
    int bit_width = 0;
    std::vector<uint32_t> val;
};

// A blocks laid out on the smallest-|a_r - a_c| grid factorization of A
// (ties resolved toward a_r <= a_c); each base block is expanded on every
// side by floor(overlap * side / 2) pixels and clipped to the image.
struct BlockSpec {
    int blocks = 8;
    double overlap = 0.5;
    void validate() const;
};

struct Window {
    int r0 = 0, r1 = 0; // half-open pixel ranges
    int c0 = 0, c1 = 0;
    int pixel_count() const { return (r1 - r0) * (c1 - c0); }
};

// pixelwise S(x) = 1 if x > 0 else 0 (zero maps to 0)
BitMap binarize(const Image &map);

// pixelwise sum of 2^(l-1) * bits[l-1]; bits are ordered by filter index
HashedMap hash_group(std::span<const BitMap> bits);

std::vector<Window> block_windows(int rows, int cols, const BlockSpec &spec);

// Per hashed map and window: empirical distribution p(t) over the 2^L bin
// values; the feature entry for t is -ln p(t) when the bin is occupied and 0
// otherwise. Entries are concatenated (map, window, bin), maps in the order
// given (lineage order upstream).
Eigen::VectorXd iq_descriptor(std::span<const HashedMap> hashed,
                              const std::vector<Window> &windows);

Eigen::VectorXd fuse_views(const Eigen::VectorXd &o1, const Eigen::VectorXd &o2);

} // namespace odmtc
