#include "core/network.hpp"

#include "core/common.hpp"
#include "core/parallel.hpp"

#include <chrono>
#include <set>

namespace odmtc {

void NetworkConfig::validate() const {
    patch.validate();
    require(layer_filters.size() >= 2, ErrorCode::Config,
            "at least 2 layers required (one convolutional stage feeding one hashing stage)");
    for (int l : layer_filters)
        require(l >= 1 && l <= patch.dim(), ErrorCode::Config,
                "filter count " + std::to_string(l) + " outside [1, " +
                    std::to_string(patch.dim()) + "] for " + std::to_string(patch.l1) + "x" +
                    std::to_string(patch.l2) + " patches");
}

Image convolve_map(const Image &map, const Eigen::MatrixXd &filter) {
    require(filter.rows() % 2 == 1 && filter.cols() % 2 == 1, ErrorCode::Argument,
            "filter sides must be odd");
    const int hr = static_cast<int>(filter.rows()) / 2;
    const int hc = static_cast<int>(filter.cols()) / 2;
    Image out(map.rows, map.cols);
    for (int r = 0; r < map.rows; ++r) {
        for (int c = 0; c < map.cols; ++c) {
            double acc = 0.0;
            const int a0 = std::max(0, hr - r);
            const int a1 = std::min<int>(filter.rows(), map.rows + hr - r);
            const int b0 = std::max(0, hc - c);
            const int b1 = std::min<int>(filter.cols(), map.cols + hc - c);
            for (int b = b0; b < b1; ++b)
                for (int a = a0; a < a1; ++a)
                    acc += filter(a, b) * map.at(r - hr + a, c - hc + b);
            out.at(r, c) = acc;
        }
    }
    return out;
}

void convolve_bank(const Image &map, const Eigen::MatrixXd &omega, const PatchGeometry &geom,
                   Eigen::MatrixXd &patch_scratch, std::vector<Image> &out) {
    const long long pixels = static_cast<long long>(map.rows) * map.cols;
    patch_scratch.resize(geom.dim(), pixels);
    extract_image_patches(map, geom, patch_scratch);
    // row-major result so each filter's map is a contiguous raster row
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> maps =
        omega.transpose() * patch_scratch; // L x pixels
    const int l = static_cast<int>(omega.cols());
    out.resize(l);
    for (int g = 0; g < l; ++g) {
        out[g].rows = map.rows;
        out[g].cols = map.cols;
        const double *row = maps.data() + static_cast<long long>(g) * pixels;
        out[g].pix.assign(row, row + pixels);
    }
}

namespace {

// maps after `layer_count` layers for one view; `layers` may be partially
// built (fit uses it while later banks do not exist yet)
std::vector<Image> forward_layers(const Image &input, const std::vector<LayerState> &layers,
                                  const PatchGeometry &geom, int view, int layer_count) {
    std::vector<Image> current{input};
    Eigen::MatrixXd scratch;
    std::vector<Image> bank_out;
    for (int i = 0; i < layer_count; ++i) {
        const Eigen::MatrixXd &omega =
            view == 1 ? layers[i].bank.omega1 : layers[i].bank.omega2;
        std::vector<Image> next;
        next.reserve(current.size() * omega.cols());
        for (const Image &m : current) {
            convolve_bank(m, omega, geom, scratch, bank_out);
            for (auto &img : bank_out)
                next.push_back(std::move(img));
        }
        current = std::move(next);
    }
    return current;
}

} // namespace

std::vector<Image> forward_view(const Image &input, const TrainedModel &model, int view,
                                int layer_count) {
    require(view == 1 || view == 2, ErrorCode::Argument, "view must be 1 or 2");
    require(layer_count >= 0 && layer_count <= static_cast<int>(model.layers.size()),
            ErrorCode::Argument, "layer count out of range");
    require(input.rows == model.image_rows && input.cols == model.image_cols, ErrorCode::Data,
            "image size does not match the trained geometry");
    return forward_layers(input, model.layers, model.net.patch, view, layer_count);
}

TrainedModel fit(const MultiViewDataset &ds, std::span<const int> train_indices,
                 const NetworkConfig &net, const BlockSpec &blocks, int threads,
                 FitReport *report) {
    net.validate();
    blocks.validate();
    ds.validate();
    require(!train_indices.empty(), ErrorCode::Data, "empty training index set");
    {
        std::set<int> seen;
        for (int idx : train_indices) {
            require(idx >= 0 && idx < ds.size(), ErrorCode::Argument,
                    "training index out of range");
            seen.insert(ds.labels[idx]);
        }
        require(seen.size() >= 2, ErrorCode::Data,
                "training split must contain at least 2 classes");
    }

    TrainedModel model;
    model.net = net;
    model.blocks = blocks;
    model.image_rows = ds.rows();
    model.image_cols = ds.cols();
    model.class_count = ds.class_count;
    model.class_names = ds.class_names;

    const int dim = net.patch.dim();
    const int n_layers = static_cast<int>(net.layer_filters.size());
    if (report)
        report->layers.clear();

    for (int layer = 0; layer < n_layers; ++layer) {
        const auto started = std::chrono::steady_clock::now();

        // per-sample partial statistics, merged in index order so the result
        // does not depend on the thread count
        std::vector<PatchAccumulator> acc1(train_indices.size()),
            acc2(train_indices.size());
        parallel_for(static_cast<int64_t>(train_indices.size()), threads, [&](int64_t t) {
            const int idx = train_indices[t];
            PatchAccumulator a1(dim, ds.class_count), a2(dim, ds.class_count);
            const std::vector<Image> maps1 =
                forward_layers(ds.view1[idx], model.layers, net.patch, 1, layer);
            const std::vector<Image> maps2 =
                forward_layers(ds.view2[idx], model.layers, net.patch, 2, layer);
            Eigen::MatrixXd scratch(dim, static_cast<long long>(ds.rows()) * ds.cols());
            for (const Image &m : maps1) {
                extract_image_patches(m, net.patch, scratch);
                a1.add(scratch, ds.labels[idx]);
            }
            for (const Image &m : maps2) {
                extract_image_patches(m, net.patch, scratch);
                a2.add(scratch, ds.labels[idx]);
            }
            acc1[t] = std::move(a1);
            acc2[t] = std::move(a2);
        });
        PatchAccumulator total1(dim, ds.class_count), total2(dim, ds.class_count);
        for (size_t t = 0; t < train_indices.size(); ++t) {
            total1.merge(acc1[t]);
            total2.merge(acc2[t]);
        }

        const CorrelationSet corr = build_correlations(total1, total2);
        LayerState state;
        state.bank = solve_dca(corr, net.layer_filters[layer]);
        state.bank.layer_index = layer;
        reshape_filters(state.bank, net.patch);
        state.mean1 = total1.mean();
        state.mean2 = total2.mean();

        if (report) {
            FitReport::Layer rep;
            rep.spectrum = state.bank.spectrum;
            rep.effective_rank = 0;
            if (rep.spectrum.size() > 0 && rep.spectrum(0) > 0.0)
                for (int i = 0; i < rep.spectrum.size(); ++i)
                    rep.effective_rank += rep.spectrum(i) > 1e-8 * rep.spectrum(0);
            rep.patch_columns = total1.count();
            rep.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                    .count();
            report->layers.push_back(std::move(rep));
        }
        model.layers.push_back(std::move(state));
    }

    // descriptor dimensions implied by the layer widths
    model.meta.bit_width = net.layer_filters.back();
    model.meta.group_count = 1;
    for (int i = 0; i + 1 < n_layers; ++i)
        model.meta.group_count *= net.layer_filters[i];
    model.meta.per_view_length =
        (1ll << model.meta.bit_width) * model.meta.group_count * blocks.blocks;
    model.meta.fused_length = 2 * model.meta.per_view_length;
    return model;
}

std::vector<SampleMaps> forward(const TrainedModel &model, const MultiViewDataset &ds,
                                std::span<const int> indices, int threads) {
    std::vector<SampleMaps> out(indices.size());
    parallel_for(static_cast<int64_t>(indices.size()), threads, [&](int64_t t) {
        const int idx = indices[t];
        require(idx >= 0 && idx < ds.size(), ErrorCode::Argument, "sample index out of range");
        out[t].view1 = forward_view(ds.view1[idx], model, 1,
                                    static_cast<int>(model.layers.size()));
        out[t].view2 = forward_view(ds.view2[idx], model, 2,
                                    static_cast<int>(model.layers.size()));
    });
    return out;
}

std::vector<HashedMap> hashed_view(const TrainedModel &model, const Image &input, int view) {
    const std::vector<Image> maps =
        forward_view(input, model, view, static_cast<int>(model.layers.size()));
    const int l_last = model.net.layer_filters.back();
    require(maps.size() % l_last == 0, ErrorCode::Internal, "map count not divisible by L_n");
    std::vector<HashedMap> out;
    out.reserve(maps.size() / l_last);
    std::vector<BitMap> bits(l_last);
    for (size_t g = 0; g < maps.size(); g += l_last) {
        for (int l = 0; l < l_last; ++l)
            bits[l] = binarize(maps[g + l]);
        out.push_back(hash_group(bits));
    }
    return out;
}

Eigen::VectorXd extract_descriptor(const TrainedModel &model, const Image &img1,
                                   const Image &img2) {
    const std::vector<Window> windows =
        block_windows(model.image_rows, model.image_cols, model.blocks);
    const std::vector<HashedMap> h1 = hashed_view(model, img1, 1);
    const std::vector<HashedMap> h2 = hashed_view(model, img2, 2);
    return fuse_views(iq_descriptor(h1, windows), iq_descriptor(h2, windows));
}

FeatureMatrix extract_features(const TrainedModel &model, const MultiViewDataset &ds,
                               std::span<const int> indices, int threads) {
    require(!indices.empty(), ErrorCode::Argument, "empty index set");
    FeatureMatrix out(indices.size(), model.meta.fused_length);
    parallel_for(static_cast<int64_t>(indices.size()), threads, [&](int64_t t) {
        const int idx = indices[t];
        require(idx >= 0 && idx < ds.size(), ErrorCode::Argument, "sample index out of range");
        const Eigen::VectorXd d = extract_descriptor(model, ds.view1[idx], ds.view2[idx]);
        require(d.size() == model.meta.fused_length, ErrorCode::Internal,
                "descriptor length mismatch");
        out.row(t) = d.cast<float>();
    });
    return out;
}

} // namespace odmtc
