#pragma once

#include "core/patches.hpp"

#include <Eigen/Dense>

#include <vector>

namespace odmtc {

// Correlation statistics of a pair of centered patch sets.
//
// cross is the discriminant cross-correlation 2 * x1 D x2^T, computed from
// per-class column sums: x1 D x2^T == sum_l s1_l s2_l^T, where D is the
// block matrix of all-ones class blocks. D (N x N, N = M*p*q) is never
// materialized; the class-sum identity reduces the cost to O(N*dim + c*dim^2).
struct CorrelationSet {
    Eigen::MatrixXd cross;              // 2 * sum_l s1_l s2_l^T
    Eigen::MatrixXd auto1, auto2;       // x_d x_d^T + reg_epsilon_d I
    Eigen::MatrixXd class_sums1, class_sums2; // dim x c, centered
    double reg_epsilon1 = 0.0;
    double reg_epsilon2 = 0.0;
    int class_count = 0;
    long long column_count = 0;
};

// Paired projection columns with their correlation values, plus the columns
// reshaped to 2D kernels (after reshape_filters).
struct DcaFilterBank {
    Eigen::MatrixXd omega1, omega2; // dim x L
    Eigen::VectorXd eigenvalues;    // L kept values, descending
    Eigen::VectorXd spectrum;       // all dim singular values of the whitened cross
    std::vector<Eigen::MatrixXd> filters1, filters2; // L kernels of l1 x l2 each
    int layer_index = 0;
};

CorrelationSet build_correlations(const CenteredPatchMatrix &x1, const CenteredPatchMatrix &x2);
CorrelationSet build_correlations(const PatchAccumulator &a1, const PatchAccumulator &a2);

// Maximizes w1^T cross w2 subject to w_d^T auto_d w_d = 1 via whitening:
// auto_d = R_d^T R_d (Cholesky), SVD of R1^{-T} cross R2^{-1}, singular
// vectors mapped back through R_d^{-1}. Keeps the top-L pairs; eigenvalues
// are the singular values. Each returned column is sign-fixed so that its
// largest-magnitude entry (lowest index on ties) is positive.
DcaFilterBank solve_dca(const CorrelationSet &corr, int L);

// Inverse of the patch vectorization: column-major fill into l1 x l2.
Eigen::MatrixXd reshape_filter(const Eigen::VectorXd &column, const PatchGeometry &geom);
void reshape_filters(DcaFilterBank &bank, const PatchGeometry &geom);

// Number of whitened-cross singular values above tol * (largest value).
// Bounded by the class count, since rank(cross) <= c.
int effective_rank(const CorrelationSet &corr, double tol);

} // namespace odmtc
