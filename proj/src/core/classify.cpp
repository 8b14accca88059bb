#include "core/classify.hpp"

#include "core/common.hpp"
#include "core/parallel.hpp"

#include <cmath>
#include <iostream>

namespace odmtc {

ClassifierKind classifier_kind_from_string(const std::string &name) {
    if (name == "nn-cosine")
        return ClassifierKind::NnCosine;
    if (name == "ridge")
        return ClassifierKind::RidgeOvr;
    fail(ErrorCode::Config, "unknown classifier kind: " + name);
}

std::string classifier_kind_name(ClassifierKind kind) {
    return kind == ClassifierKind::NnCosine ? "nn-cosine" : "ridge";
}

namespace {

Eigen::VectorXd row_norms(const FeatureMatrix &features) {
    Eigen::VectorXd norms(features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const double n = features.row(i).cast<double>().norm();
        norms(i) = n > 0.0 ? n : 1.0;
    }
    return norms;
}

} // namespace

ClassifierState train_classifier(const FeatureMatrix &features, const std::vector<int> &labels,
                                 ClassifierKind kind, int class_count) {
    require(features.rows() == static_cast<Eigen::Index>(labels.size()), ErrorCode::Argument,
            "one label per feature row required");
    require(features.rows() >= 1, ErrorCode::Data, "no training samples");
    require(class_count >= 2, ErrorCode::Data, "at least 2 classes required");

    std::vector<int> per_class(class_count, 0);
    for (int l : labels) {
        require(l >= 0 && l < class_count, ErrorCode::Data, "label out of range");
        ++per_class[l];
    }
    if (kind == ClassifierKind::NnCosine)
        for (int l = 0; l < class_count; ++l)
            require(per_class[l] >= 1, ErrorCode::Data,
                    "class " + std::to_string(l) + " has no training samples");

    bool all_identical = true;
    for (Eigen::Index i = 1; i < features.rows() && all_identical; ++i)
        all_identical = features.row(i) == features.row(0);
    if (all_identical && features.rows() > 1)
        std::cerr << "odmtc: warning: all training descriptors are identical\n";

    ClassifierState state;
    state.kind = kind;
    state.class_count = class_count;
    if (kind == ClassifierKind::NnCosine) {
        state.train_features = features;
        state.train_labels = labels;
        return state;
    }

    // dual ridge with intercept: augmented rows [x/|x|, 1], lambda = 1;
    // the Gram matrix is formed in float and normalized afterwards so the
    // (potentially huge) feature matrix is never copied to double
    const Eigen::Index n = features.rows();
    const Eigen::VectorXd norms = row_norms(features);
    Eigen::MatrixXd gram = (features * features.transpose()).cast<double>();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            gram(i, j) = gram(i, j) / (norms(i) * norms(j)) + 1.0; // +1: intercept feature
    gram.diagonal().array() += 1.0;                                // lambda
    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(n, class_count);
    for (Eigen::Index i = 0; i < n; ++i)
        targets(i, labels[i]) = 1.0;
    Eigen::MatrixXd alpha = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(targets);
    state.bias = alpha.colwise().sum();
    for (Eigen::Index i = 0; i < n; ++i)
        alpha.row(i) /= norms(i);
    // weights = sum_i x_i alpha_i, accumulated in double over row chunks
    state.weights = Eigen::MatrixXd::Zero(features.cols(), class_count);
    const Eigen::Index chunk = 16;
    for (Eigen::Index begin = 0; begin < n; begin += chunk) {
        const Eigen::Index count = std::min(chunk, n - begin);
        state.weights.noalias() += features.middleRows(begin, count).cast<double>().transpose() *
                                   alpha.middleRows(begin, count);
    }
    return state;
}

namespace {

int argmax_lowest_tie(const Eigen::VectorXd &scores) {
    int best = 0;
    for (int j = 1; j < scores.size(); ++j)
        if (scores(j) > scores(best))
            best = j;
    return best;
}

} // namespace

std::vector<int> predict(const ClassifierState &state, const FeatureMatrix &features, int threads) {
    require(features.cols() ==
                (state.kind == ClassifierKind::NnCosine ? state.train_features.cols()
                                                        : state.weights.rows()),
            ErrorCode::Argument, "feature dimension does not match the trained classifier");
    std::vector<int> out(features.rows());

    if (state.kind == ClassifierKind::RidgeOvr) {
        const Eigen::VectorXd norms = row_norms(features);
        parallel_for(features.rows(), threads, [&](int64_t i) {
            const Eigen::VectorXd scores =
                state.weights.transpose() * (features.row(i).cast<double>() / norms(i)).transpose() +
                state.bias;
            out[i] = argmax_lowest_tie(scores);
        });
        return out;
    }

    Eigen::VectorXd train_norms(state.train_features.rows());
    for (Eigen::Index j = 0; j < state.train_features.rows(); ++j)
        train_norms(j) = state.train_features.row(j).cast<double>().norm();

    // one inner-product GEMM per chunk of queries; each output row depends
    // only on its own chunk, so chunking does not change results
    const int64_t chunk = 64;
    const int64_t chunks = (features.rows() + chunk - 1) / chunk;
    parallel_for(chunks, threads, [&](int64_t ci) {
        const Eigen::Index begin = ci * chunk;
        const Eigen::Index count = std::min<Eigen::Index>(chunk, features.rows() - begin);
        const Eigen::MatrixXf dots =
            features.middleRows(begin, count) * state.train_features.transpose();
        for (Eigen::Index i = 0; i < count; ++i) {
            const double qnorm = features.row(begin + i).cast<double>().norm();
            double best_sim = -2.0;
            int best_class = state.class_count;
            for (Eigen::Index j = 0; j < state.train_features.rows(); ++j) {
                const double denom = qnorm * train_norms(j);
                const double sim = denom > 0.0 ? dots(i, j) / denom : 0.0;
                const int cls = state.train_labels[j];
                if (sim > best_sim || (sim == best_sim && cls < best_class)) {
                    best_sim = sim;
                    best_class = cls;
                }
            }
            out[begin + i] = best_class;
        }
    });
    return out;
}

double accuracy_percent(const std::vector<int> &predicted, const std::vector<int> &truth) {
    require(predicted.size() == truth.size() && !truth.empty(), ErrorCode::Argument,
            "prediction/label size mismatch");
    long long correct = 0;
    for (size_t i = 0; i < truth.size(); ++i)
        correct += predicted[i] == truth[i];
    return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
}

std::pair<double, double> mean_stddev(const std::vector<double> &values) {
    require(!values.empty(), ErrorCode::Argument, "no values");
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

} // namespace odmtc
