#pragma once

#include "core/network.hpp"

#include <string>

namespace odmtc {

// Binary model container, little-endian throughout.
//
//   "ODMC" magic, u32 version (currently 1)
//   u64 config length + canonical config JSON bytes
//   u32 l1, l2, layer_count, image_rows, image_cols, class_count
//   class names: per class u32 length + bytes
//   per layer: u32 filter_count, u32 patch_dim,
//              f64 eigenvalues[filter_count], f64 spectrum[patch_dim],
//              f64 mean1[patch_dim], f64 mean2[patch_dim],
//              f64 filters1[patch_dim * filter_count]   (column g = filter g,
//              column-major within the patch), f64 filters2[...]
//   u32 blocks, f64 overlap
//   u32 bit_width, u64 group_count, u64 per_view_length, u64 fused_length
//   u8 has_classifier; when set:
//     u8 kind (0 = nn-cosine, 1 = ridge), u32 class_count
//     nn:    u64 rows, u64 dim, i32 labels[rows], f32 features[rows * dim]
//     ridge: u64 dim, u32 classes, f64 weights[dim * classes], f64 bias[classes]
void save_model(const TrainedModel &model, const std::string &path);
TrainedModel load_model(const std::string &path);

} // namespace odmtc
