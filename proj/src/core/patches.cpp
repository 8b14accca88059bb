#include "core/patches.hpp"

#include "core/common.hpp"

namespace odmtc {

void PatchGeometry::validate() const {
    require(l1 >= 3 && l2 >= 3, ErrorCode::Config, "patch sides must be >= 3");
    require(l1 % 2 == 1 && l2 % 2 == 1, ErrorCode::Config,
            "patch sides must be odd so the patch centers on a pixel");
}

void extract_image_patches(const Image &img, const PatchGeometry &geom,
                           Eigen::Ref<Eigen::MatrixXd> out, int col0) {
    const int p = img.rows, q = img.cols;
    const int hr = geom.pad_rows(), hc = geom.pad_cols();
    require(out.rows() == geom.dim() && out.cols() >= col0 + static_cast<long>(p) * q,
            ErrorCode::Argument, "patch output block too small");
    for (int r = 0; r < p; ++r) {
        for (int c = 0; c < q; ++c) {
            double *col = out.col(col0 + r * q + c).data();
            // column-major within the patch: b-th patch column, then row a
            for (int b = 0; b < geom.l2; ++b) {
                const int sc = c - hc + b;
                const bool cin = sc >= 0 && sc < q;
                for (int a = 0; a < geom.l1; ++a) {
                    const int sr = r - hr + a;
                    col[b * geom.l1 + a] =
                        (cin && sr >= 0 && sr < p) ? img.at(sr, sc) : 0.0;
                }
            }
        }
    }
}

RawPatchMatrix extract_patches(const ImageStack &stack, const PatchGeometry &geom,
                               const std::vector<int> &labels) {
    geom.validate();
    require(!stack.empty(), ErrorCode::Data, "empty image stack");
    require(labels.size() == stack.size(), ErrorCode::Argument,
            "one label per image required");
    const int p = stack[0].rows, q = stack[0].cols;
    const long long per_image = static_cast<long long>(p) * q;
    RawPatchMatrix out;
    out.geom = geom;
    out.data.resize(geom.dim(), per_image * static_cast<long long>(stack.size()));
    out.labels.resize(out.data.cols());
    out.source.resize(out.data.cols());
    for (size_t k = 0; k < stack.size(); ++k) {
        require(stack[k].rows == p && stack[k].cols == q, ErrorCode::Data,
                "stack images must share one size");
        const long long base = per_image * static_cast<long long>(k);
        extract_image_patches(stack[k], geom, out.data, static_cast<int>(base));
        for (long long j = 0; j < per_image; ++j) {
            out.labels[base + j] = labels[k];
            out.source[base + j] = {static_cast<int>(k), static_cast<int>(j)};
        }
    }
    return out;
}

CenteredPatchMatrix center(const RawPatchMatrix &raw) {
    require(raw.data.cols() > 0, ErrorCode::Data, "cannot center an empty patch matrix");
    CenteredPatchMatrix out;
    out.geom = raw.geom;
    out.labels = raw.labels;
    out.source = raw.source;
    out.mean = raw.data.rowwise().mean();
    out.data = raw.data.colwise() - out.mean;
    return out;
}

PatchAccumulator::PatchAccumulator(int dim, int class_count)
    : second_moment_(Eigen::MatrixXd::Zero(dim, dim)),
      class_totals_(Eigen::MatrixXd::Zero(dim, class_count)),
      total_(Eigen::VectorXd::Zero(dim)),
      class_counts_(class_count, 0) {}

void PatchAccumulator::add(const Eigen::MatrixXd &cols, int label) {
    require(cols.rows() == second_moment_.rows(), ErrorCode::Argument, "patch dim mismatch");
    require(label >= 0 && label < class_count(), ErrorCode::Argument, "label out of range");
    second_moment_.selfadjointView<Eigen::Lower>().rankUpdate(cols, 1.0);
    const Eigen::VectorXd colsum = cols.rowwise().sum();
    class_totals_.col(label) += colsum;
    total_ += colsum;
    class_counts_[label] += cols.cols();
    n_ += cols.cols();
}

void PatchAccumulator::merge(const PatchAccumulator &other) {
    require(other.dim() == dim() && other.class_count() == class_count(), ErrorCode::Argument,
            "accumulator shape mismatch");
    second_moment_ += other.second_moment_;
    class_totals_ += other.class_totals_;
    total_ += other.total_;
    for (size_t l = 0; l < class_counts_.size(); ++l)
        class_counts_[l] += other.class_counts_[l];
    n_ += other.n_;
}

Eigen::VectorXd PatchAccumulator::mean() const {
    require(n_ > 0, ErrorCode::Data, "no patches accumulated");
    return total_ / static_cast<double>(n_);
}

Eigen::MatrixXd PatchAccumulator::centered_auto() const {
    const Eigen::VectorXd mu = mean();
    Eigen::MatrixXd full = second_moment_.selfadjointView<Eigen::Lower>();
    full.noalias() -= static_cast<double>(n_) * mu * mu.transpose();
    // symmetrize away rounding
    return 0.5 * (full + full.transpose());
}

Eigen::MatrixXd PatchAccumulator::centered_class_sums() const {
    const Eigen::VectorXd mu = mean();
    Eigen::MatrixXd s = class_totals_;
    for (int l = 0; l < s.cols(); ++l)
        s.col(l) -= static_cast<double>(class_counts_[l]) * mu;
    return s;
}

} // namespace odmtc
