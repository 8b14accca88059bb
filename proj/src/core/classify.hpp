#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace odmtc {

// Row-major so one row is one sample's descriptor; float keeps the large
// descriptor matrices (hundreds of MB for face benchmarks) affordable.
using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ClassifierKind {
    NnCosine, // nearest neighbor under cosine similarity
    RidgeOvr, // one-vs-rest ridge regression on unit-normalized features
};

ClassifierKind classifier_kind_from_string(const std::string &name);
std::string classifier_kind_name(ClassifierKind kind);

struct ClassifierState {
    ClassifierKind kind = ClassifierKind::NnCosine;
    int class_count = 0;
    // nn-cosine
    FeatureMatrix train_features;
    std::vector<int> train_labels;
    // ridge: scores = X_normalized * weights + bias
    Eigen::MatrixXd weights; // dim x c
    Eigen::VectorXd bias;    // c
};

// Ridge uses a fixed regularizer of 1.0 on unit-normalized rows and an
// intercept; the dual (sample-space) system is solved so dimension never
// enters the factorization.
ClassifierState train_classifier(const FeatureMatrix &features, const std::vector<int> &labels,
                                 ClassifierKind kind, int class_count);

// Deterministic; all similarity/score ties break toward the lowest class index.
std::vector<int> predict(const ClassifierState &state, const FeatureMatrix &features,
                         int threads = 0);

double accuracy_percent(const std::vector<int> &predicted, const std::vector<int> &truth);

// mean and sample standard deviation (n-1 denominator; 0 when n < 2)
std::pair<double, double> mean_stddev(const std::vector<double> &values);

} // namespace odmtc
