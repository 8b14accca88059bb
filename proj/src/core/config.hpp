#pragma once

#include "core/classify.hpp"
#include "core/dataset.hpp"
#include "core/encoding.hpp"
#include "core/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace odmtc {

// Experiment configuration, read from a JSON file. Unknown keys anywhere in
// the document are hard errors; silent config typos are the main
// reproducibility hazard.
struct ExperimentConfig {
    struct Dataset {
        std::string kind = "image-dirs"; // or "csv"
        std::string root;                // image-dirs
        int resize_rows = 0, resize_cols = 0;
        // csv first view
        std::string csv_features;
        std::string csv_labels;
        int map_rows = 0, map_cols = 0;
        // second view generator
        std::string view2_kind = "lbp"; // lbp | wavelet | channel-split | csv
        int wavelet_levels = 2;
        int channel_first = 0, channel_second = 1;
        std::string view2_csv_features;
    } dataset;

    NetworkConfig network;
    BlockSpec descriptor;

    struct SplitCfg {
        std::string kind = "random"; // random | indices | all
        SplitSpec random;
        std::vector<int> train_indices, test_indices;
    } split;

    ClassifierKind classifier = ClassifierKind::NnCosine;
    int threads = 0;
    bool store_classifier = true;

    void validate() const;
};

ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig load_config(const std::string &path);

// Canonical serialization: parse(dump(c)) == c, keys sorted, stable digits.
std::string dump_config(const ExperimentConfig &cfg);

// FNV-1a of the canonical dump, as fixed-width hex; identifies a config in
// result files.
std::string config_hash(const ExperimentConfig &cfg);

} // namespace odmtc
