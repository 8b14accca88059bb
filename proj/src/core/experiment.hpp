#pragma once

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/network.hpp"

#include <string>
#include <vector>

namespace odmtc {

// Builds both views per the config (image directories or CSV feature maps,
// second view by LBP / wavelet / channel split / CSV).
MultiViewDataset dataset_from_config(const ExperimentConfig &cfg);

// The configured splits: `repetitions` random splits, one explicit index
// split, or one degenerate all-train split.
std::vector<Split> resolve_splits(const ExperimentConfig &cfg, const MultiViewDataset &ds);

struct TrainOutcome {
    TrainedModel model;
    FitReport report;
    Split split; // indices the model was fitted on
};

// Fits banks + classifier on the first repetition's training indices.
TrainOutcome run_train(const ExperimentConfig &cfg, const MultiViewDataset &ds);

struct EvalOutcome {
    std::vector<double> accuracies; // percent, one per repetition
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<Split> splits;
};

// Full protocol: per repetition fit on train, extract train/test descriptors,
// train the classifier, score the test split. When out_dir is non-empty,
// writes results.csv, splits.csv and summary.txt (all byte-stable for a
// fixed config and seed).
EvalOutcome run_evaluate(const ExperimentConfig &cfg, const MultiViewDataset &ds,
                         const std::string &out_dir);

struct SweepRow {
    int filters = 0;
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<int> effective_ranks; // per layer, from the first repetition's fit
};

// Applies each L uniformly to all layers, evaluates, and reports whether the
// best L stays at or below the class count. Writes sweep.csv and
// sweep_summary.txt into out_dir when non-empty.
std::vector<SweepRow> run_sweep(const ExperimentConfig &cfg, const MultiViewDataset &ds,
                                const std::vector<int> &l_values, const std::string &out_dir);

void write_train_log(const std::string &path, const ExperimentConfig &cfg,
                     const FitReport &report);

// features.csv / features.bin (raw little-endian f32 rows) + JSON sidecar
void write_features(const std::string &dir, const std::string &format,
                    const FeatureMatrix &features, const std::vector<int> &indices,
                    const TrainedModel &model);

std::string model_description(const TrainedModel &model);

} // namespace odmtc
