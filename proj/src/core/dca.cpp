#include "core/dca.hpp"

#include "core/common.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace odmtc {

namespace {

constexpr double kRidgeScale = 1e-8;

double ridge_for(const Eigen::MatrixXd &auto_raw) {
    return kRidgeScale * auto_raw.trace() / static_cast<double>(auto_raw.rows());
}

CorrelationSet assemble(Eigen::MatrixXd auto1_raw, Eigen::MatrixXd auto2_raw,
                        Eigen::MatrixXd s1, Eigen::MatrixXd s2, long long columns) {
    const int c = static_cast<int>(s1.cols());
    if (c < 2)
        std::cerr << "odmtc: warning: single-class input, cross-correlation rank <= 1\n";
    CorrelationSet out;
    out.class_count = c;
    out.column_count = columns;
    out.cross.noalias() = 2.0 * s1 * s2.transpose();
    out.reg_epsilon1 = ridge_for(auto1_raw);
    out.reg_epsilon2 = ridge_for(auto2_raw);
    auto1_raw.diagonal().array() += out.reg_epsilon1;
    auto2_raw.diagonal().array() += out.reg_epsilon2;
    out.auto1 = std::move(auto1_raw);
    out.auto2 = std::move(auto2_raw);
    out.class_sums1 = std::move(s1);
    out.class_sums2 = std::move(s2);
    return out;
}

// Whitened cross-correlation R1^{-T} cross R2^{-1} together with the
// Cholesky factors, shared by solve_dca and effective_rank.
struct Whitened {
    Eigen::LLT<Eigen::MatrixXd> llt1, llt2;
    Eigen::MatrixXd k;
};

Whitened whiten(const CorrelationSet &corr) {
    Whitened w;
    w.llt1.compute(corr.auto1);
    require(w.llt1.info() == Eigen::Success, ErrorCode::Numeric,
            "auto-correlation factorization failed for view 1 (insufficient regularization; "
            "input patches may be all-constant)");
    w.llt2.compute(corr.auto2);
    require(w.llt2.info() == Eigen::Success, ErrorCode::Numeric,
            "auto-correlation factorization failed for view 2 (insufficient regularization; "
            "input patches may be all-constant)");
    const Eigen::MatrixXd r1 = w.llt1.matrixU();
    const Eigen::MatrixXd r2 = w.llt2.matrixU();
    // k = R1^{-T} cross R2^{-1}
    Eigen::MatrixXd y = r1.transpose().triangularView<Eigen::Lower>().solve(corr.cross);
    w.k = r2.transpose()
              .triangularView<Eigen::Lower>()
              .solve(Eigen::MatrixXd(y.transpose()))
              .transpose();
    return w;
}

void fix_column_signs(Eigen::MatrixXd &m) {
    for (int g = 0; g < m.cols(); ++g) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < m.rows(); ++i) {
            const double a = std::abs(m(i, g));
            if (a > best) { // strict: ties keep the lowest index
                best = a;
                arg = i;
            }
        }
        if (m(arg, g) < 0.0)
            m.col(g) = -m.col(g);
    }
}

} // namespace

CorrelationSet build_correlations(const CenteredPatchMatrix &x1, const CenteredPatchMatrix &x2) {
    require(x1.data.cols() == x2.data.cols(), ErrorCode::Data,
            "views must contribute the same number of patch columns");
    require(x1.labels == x2.labels, ErrorCode::Data,
            "patch labels differ between views; pairing is broken");
    require(x1.data.cols() > 0, ErrorCode::Data, "empty patch matrix");

    const int c = *std::max_element(x1.labels.begin(), x1.labels.end()) + 1;
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(x1.data.rows(), c);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(x2.data.rows(), c);
    for (long long j = 0; j < x1.data.cols(); ++j) {
        s1.col(x1.labels[j]) += x1.data.col(j);
        s2.col(x1.labels[j]) += x2.data.col(j);
    }
    Eigen::MatrixXd a1 = x1.data * x1.data.transpose();
    Eigen::MatrixXd a2 = x2.data * x2.data.transpose();
    return assemble(std::move(a1), std::move(a2), std::move(s1), std::move(s2), x1.data.cols());
}

CorrelationSet build_correlations(const PatchAccumulator &a1, const PatchAccumulator &a2) {
    require(a1.count() == a2.count(), ErrorCode::Data,
            "views must contribute the same number of patch columns");
    require(a1.class_counts() == a2.class_counts(), ErrorCode::Data,
            "per-class patch counts differ between views; pairing is broken");
    require(a1.count() > 0, ErrorCode::Data, "empty accumulator");
    return assemble(a1.centered_auto(), a2.centered_auto(), a1.centered_class_sums(),
                    a2.centered_class_sums(), a1.count());
}

DcaFilterBank solve_dca(const CorrelationSet &corr, int L) {
    const int dim = static_cast<int>(corr.cross.rows());
    require(L >= 1 && L <= dim, ErrorCode::Argument,
            "filter count must be in [1, " + std::to_string(dim) + "], got " + std::to_string(L));

    Whitened w = whiten(corr);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w.k, Eigen::ComputeFullU | Eigen::ComputeFullV);

    // Eigen returns singular values descending already; the stable re-sort
    // pins the ordering contract even for degenerate ties.
    std::vector<int> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return svd.singularValues()(a) > svd.singularValues()(b);
    });

    DcaFilterBank bank;
    bank.spectrum.resize(dim);
    for (int i = 0; i < dim; ++i)
        bank.spectrum(i) = svd.singularValues()(order[i]);
    bank.eigenvalues = bank.spectrum.head(L);

    const Eigen::MatrixXd r1 = w.llt1.matrixU();
    const Eigen::MatrixXd r2 = w.llt2.matrixU();
    bank.omega1.resize(dim, L);
    bank.omega2.resize(dim, L);
    for (int g = 0; g < L; ++g) {
        bank.omega1.col(g) =
            r1.triangularView<Eigen::Upper>().solve(svd.matrixU().col(order[g]));
        bank.omega2.col(g) =
            r2.triangularView<Eigen::Upper>().solve(svd.matrixV().col(order[g]));
    }
    fix_column_signs(bank.omega1);
    fix_column_signs(bank.omega2);
    return bank;
}

Eigen::MatrixXd reshape_filter(const Eigen::VectorXd &column, const PatchGeometry &geom) {
    require(column.size() == geom.dim(), ErrorCode::Argument,
            "column length " + std::to_string(column.size()) + " does not match patch size " +
                std::to_string(geom.dim()));
    return Eigen::Map<const Eigen::MatrixXd>(column.data(), geom.l1, geom.l2);
}

void reshape_filters(DcaFilterBank &bank, const PatchGeometry &geom) {
    bank.filters1.clear();
    bank.filters2.clear();
    for (int g = 0; g < bank.omega1.cols(); ++g) {
        bank.filters1.push_back(reshape_filter(bank.omega1.col(g), geom));
        bank.filters2.push_back(reshape_filter(bank.omega2.col(g), geom));
    }
}

int effective_rank(const CorrelationSet &corr, double tol) {
    Whitened w = whiten(corr);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w.k);
    const auto &sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0)
        return 0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * sv(0))
            ++rank;
    return rank;
}

} // namespace odmtc
