#pragma once

#include "core/image.hpp"

#include <Eigen/Dense>

#include <vector>

namespace odmtc {

// l1 x l2 neighborhood around every pixel, stride 1, zero padding of
// floor(l/2) on each side so a p x q image yields exactly p*q patches.
struct PatchGeometry {
    int l1 = 3; // patch rows
    int l2 = 3; // patch cols

    int dim() const { return l1 * l2; }
    int pad_rows() const { return l1 / 2; }
    int pad_cols() const { return l2 / 2; }
    void validate() const;
};

struct SourceIndex {
    int sample = 0;
    int pixel = 0; // raster position r * cols + c within the sample
};

struct RawPatchMatrix {
    // Vectorization is column-major inside the patch: entry a + b*l1 of a
    // column is patch pixel (row a, col b). reshape_filters inverts exactly
    // this layout; the two must never diverge.
    Eigen::MatrixXd data; // dim x (M*p*q); columns sample-major, raster pixel order
    std::vector<int> labels;
    std::vector<SourceIndex> source;
    PatchGeometry geom;
};

struct CenteredPatchMatrix {
    Eigen::MatrixXd data;
    Eigen::VectorXd mean; // subtracted across-column mean
    std::vector<int> labels;
    std::vector<SourceIndex> source;
    PatchGeometry geom;
};

// Writes the p*q patch columns of one image into out(:, col0..col0+p*q-1).
// out must already have geom.dim() rows and enough columns.
void extract_image_patches(const Image &img, const PatchGeometry &geom,
                           Eigen::Ref<Eigen::MatrixXd> out, int col0 = 0);

RawPatchMatrix extract_patches(const ImageStack &stack, const PatchGeometry &geom,
                               const std::vector<int> &labels);

CenteredPatchMatrix center(const RawPatchMatrix &raw);

// Streaming replacement for materializing a CenteredPatchMatrix when only
// correlation statistics are needed. Accumulates, per view,
//   S2 = sum v v^T,  T_l = per-class column sums,  n, n_l
// from which the centered auto-correlation and centered class sums follow:
//   auto = S2 - n mu mu^T,  s_l = T_l - n_l mu,  mu = (sum_l T_l) / n.
// add() order does not affect merged results beyond FP rounding; fit code
// merges per-sample partials in index order to stay deterministic.
class PatchAccumulator {
  public:
    PatchAccumulator() = default;
    PatchAccumulator(int dim, int class_count);

    // every column of `cols` carries the same label
    void add(const Eigen::MatrixXd &cols, int label);
    void merge(const PatchAccumulator &other);

    long long count() const { return n_; }
    int dim() const { return static_cast<int>(second_moment_.rows()); }
    int class_count() const { return static_cast<int>(class_totals_.cols()); }
    const std::vector<long long> &class_counts() const { return class_counts_; }

    Eigen::VectorXd mean() const;
    Eigen::MatrixXd centered_auto() const;      // without regularization
    Eigen::MatrixXd centered_class_sums() const; // dim x c

  private:
    Eigen::MatrixXd second_moment_;
    Eigen::MatrixXd class_totals_;
    Eigen::VectorXd total_;
    std::vector<long long> class_counts_;
    long long n_ = 0;
};

} // namespace odmtc
