#pragma once

#include "core/classify.hpp"
#include "core/dataset.hpp"
#include "core/dca.hpp"
#include "core/encoding.hpp"
#include "core/patches.hpp"

#include <span>
#include <string>
#include <vector>

namespace odmtc {

struct NetworkConfig {
    PatchGeometry patch;
    std::vector<int> layer_filters; // L_1 .. L_n, n >= 2
    void validate() const;
};

struct LayerState {
    DcaFilterBank bank;
    Eigen::VectorXd mean1, mean2; // training patch means (kept for reproducibility;
                                  // inference convolves raw maps, see fit())
};

struct DescriptorMeta {
    int bit_width = 0;            // filters in the final layer
    long long group_count = 0;    // prod of all earlier layer widths
    long long per_view_length = 0; // 2^bit_width * group_count * blocks
    long long fused_length = 0;
};

struct TrainedModel {
    NetworkConfig net;
    BlockSpec blocks;
    std::vector<LayerState> layers;
    DescriptorMeta meta;
    int image_rows = 0;
    int image_cols = 0;
    int class_count = 0;
    std::vector<std::string> class_names;
    ClassifierState classifier;
    bool has_classifier = false;
    std::string config_json; // canonical experiment config, embedded on save
};

struct FitReport {
    struct Layer {
        Eigen::VectorXd spectrum;
        int effective_rank = 0;
        long long patch_columns = 0;
        double seconds = 0.0;
    };
    std::vector<Layer> layers;
};

// 2D correlation (sliding inner product, no kernel flip) with zero padding
// of floor(l/2), output size equals input size. At every pixel the result
// equals filter_as_column^T * (vectorized patch), which is what ties the
// convolution output to the DCA projection.
Image convolve_map(const Image &map, const Eigen::MatrixXd &filter);

// All L maps of one bank side at once: one im2col of `map` and a GEMM
// against the stacked filter columns. Row g of the result is the raster
// pixel order of filter g's output.
void convolve_bank(const Image &map, const Eigen::MatrixXd &omega, const PatchGeometry &geom,
                   Eigen::MatrixXd &patch_scratch, std::vector<Image> &out);

// Learns one DcaFilterBank per layer. Layer 1 consumes the raw view images
// of the training samples; layer i > 1 consumes every layer-(i-1) feature
// map of every training sample (patch columns inherit the source sample's
// label, views pair by identical lineage), and the same bank is applied to
// every map. Patch statistics are centered per layer; the resulting filters
// are convolved over raw (uncentered) maps at inference, leaving a constant
// per-filter offset that the hashing threshold absorbs.
TrainedModel fit(const MultiViewDataset &ds, std::span<const int> train_indices,
                 const NetworkConfig &net, const BlockSpec &blocks, int threads = 0,
                 FitReport *report = nullptr);

// Feature maps of one view after the first `layer_count` layers, in
// lineage (lexicographic filter-path) order.
std::vector<Image> forward_view(const Image &input, const TrainedModel &model, int view,
                                int layer_count);

struct SampleMaps {
    std::vector<Image> view1, view2;
};

// Final-layer maps for the given samples; map count per view per sample is
// the product of all layer widths.
std::vector<SampleMaps> forward(const TrainedModel &model, const MultiViewDataset &ds,
                                std::span<const int> indices, int threads = 0);

// Hashing-pooled integer maps of one view, one per penultimate-layer lineage
// group (consecutive runs of final-layer maps).
std::vector<HashedMap> hashed_view(const TrainedModel &model, const Image &input, int view);

// Full per-sample pipeline: forward, hash, per-view IQ blocks, fusion.
Eigen::VectorXd extract_descriptor(const TrainedModel &model, const Image &img1,
                                   const Image &img2);

// Descriptor rows (float) for the given samples, parallel over samples.
FeatureMatrix extract_features(const TrainedModel &model, const MultiViewDataset &ds,
                               std::span<const int> indices, int threads = 0);

} // namespace odmtc
