#pragma once

#include "core/image.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace odmtc {

struct SplitSpec {
    int train_count = 0;
    int repetitions = 1;
    uint64_t rng_seed = 0;
    bool stratified = false;
};

struct Split {
    std::vector<int> train;
    std::vector<int> test;
};

// Two paired image stacks with labels. Views always have identical
// sample count and dimensions; index k of view 2 is the counterpart of
// index k of view 1.
struct MultiViewDataset {
    ImageStack view1;
    ImageStack view2;
    std::vector<int> labels;
    int class_count = 0;
    std::vector<std::string> class_names;
    std::string view_provenance;

    int size() const { return static_cast<int>(view1.size()); }
    int rows() const { return view1.empty() ? 0 : view1[0].rows; }
    int cols() const { return view1.empty() ? 0 : view1[0].cols; }
    void validate() const;
};

struct LoadOptions {
    int resize_rows = 0; // 0 = keep native size
    int resize_cols = 0;
    bool color = false; // load RGB (needed for channel-split views)
};

struct LoadedStack {
    ImageStack images;            // grayscale stack (empty when color)
    std::vector<RgbImage> rgb;    // RGB stack (empty unless color)
    std::vector<int> labels;
    std::vector<std::string> class_names;
};

// Walks root/<class_name>/<image file> (PNG or PGM). Classes are the
// subdirectory names in lexicographic order, files sorted within each.
LoadedStack load_dataset(const std::string &root, const LoadOptions &opts);

// Classic 8-neighbor radius-1 LBP, zero-padded borders. A bit is set when
// the neighbor strictly exceeds the center. Bit order is clockwise from the
// top-left neighbor: (-1,-1)=1, (-1,0)=2, (-1,+1)=4, (0,+1)=8, (+1,+1)=16,
// (+1,0)=32, (+1,-1)=64, (0,-1)=128. Codes are rescaled to [0,1] by /255.
ImageStack lbp_view(const ImageStack &images, int threads = 0);
Image lbp_image(const Image &img);

// Level-`levels` approximation subband of a separable Haar decomposition,
// normalized so constants are preserved (2x2 block means per level), then
// upsampled nearest-neighbor back to the input size.
ImageStack wavelet_view(const ImageStack &images, int levels, int threads = 0);
Image wavelet_image(const Image &img, int levels);

// One grayscale stack per selected channel (0=R, 1=G, 2=B).
std::pair<ImageStack, ImageStack> channel_views(const std::vector<RgbImage> &images,
                                                int first, int second);

// Header-free CSV, one sample per row, each row reshaped row-major to
// map_rows x map_cols.
ImageStack ingest_feature_maps(const std::string &csv_path, int map_rows, int map_cols);

// `repetitions` independent splits, deterministic in spec.rng_seed.
// Stratified splits allocate per-class train counts by largest remainder,
// so each differs from the proportional share by at most one.
std::vector<Split> make_splits(const std::vector<int> &labels, const SplitSpec &spec);

void export_splits_csv(const std::string &path, const std::vector<Split> &splits);

} // namespace odmtc
