#include "core/experiment.hpp"

#include "core/common.hpp"
#include "core/model_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace odmtc {

namespace {

std::vector<int> read_label_csv(const std::string &path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Io, "cannot open label file: " + path);
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        labels.push_back(std::stoi(line));
    }
    require(!labels.empty(), ErrorCode::Data, "no labels in " + path);
    return labels;
}

void check_open(std::ofstream &out, const std::string &path) {
    require(out.good(), ErrorCode::Io, "cannot write " + path);
}

std::string format_accuracy(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

} // namespace

MultiViewDataset dataset_from_config(const ExperimentConfig &cfg) {
    MultiViewDataset ds;
    const auto &d = cfg.dataset;

    if (d.kind == "image-dirs") {
        LoadOptions opts;
        opts.resize_rows = d.resize_rows;
        opts.resize_cols = d.resize_cols;
        opts.color = d.view2_kind == "channel-split";
        LoadedStack stack = load_dataset(d.root, opts);
        ds.labels = std::move(stack.labels);
        ds.class_names = std::move(stack.class_names);
        ds.class_count = static_cast<int>(ds.class_names.size());
        if (d.view2_kind == "channel-split") {
            auto views = channel_views(stack.rgb, d.channel_first, d.channel_second);
            ds.view1 = std::move(views.first);
            ds.view2 = std::move(views.second);
            ds.view_provenance = "channel-split " + std::to_string(d.channel_first) + "/" +
                                 std::to_string(d.channel_second);
        } else {
            ds.view1 = std::move(stack.images);
        }
    } else { // csv
        ds.view1 = ingest_feature_maps(d.csv_features, d.map_rows, d.map_cols);
        ds.labels = read_label_csv(d.csv_labels);
        require(ds.labels.size() == ds.view1.size(), ErrorCode::Data,
                "label count does not match feature row count");
        std::set<int> classes(ds.labels.begin(), ds.labels.end());
        require(!classes.empty() && *classes.begin() >= 0, ErrorCode::Data,
                "labels must be non-negative");
        ds.class_count = *classes.rbegin() + 1;
        for (int i = 0; i < ds.class_count; ++i)
            ds.class_names.push_back(std::to_string(i));
        require(classes.size() >= 2, ErrorCode::Data, "dataset needs at least 2 classes");
    }

    if (d.view2_kind == "lbp") {
        ds.view2 = lbp_view(ds.view1, cfg.threads);
        ds.view_provenance = "lbp";
    } else if (d.view2_kind == "wavelet") {
        ds.view2 = wavelet_view(ds.view1, d.wavelet_levels, cfg.threads);
        ds.view_provenance = "wavelet level " + std::to_string(d.wavelet_levels);
    } else if (d.view2_kind == "csv") {
        ds.view2 = ingest_feature_maps(d.view2_csv_features, ds.rows(), ds.cols());
        require(ds.view2.size() == ds.view1.size(), ErrorCode::Data,
                "second-view row count does not match the first view");
        ds.view_provenance = "csv";
    }
    ds.validate();
    return ds;
}

std::vector<Split> resolve_splits(const ExperimentConfig &cfg, const MultiViewDataset &ds) {
    if (cfg.split.kind == "random")
        return make_splits(ds.labels, cfg.split.random);
    if (cfg.split.kind == "indices") {
        Split s;
        s.train = cfg.split.train_indices;
        s.test = cfg.split.test_indices;
        for (int i : s.train)
            require(i >= 0 && i < ds.size(), ErrorCode::Config, "train index out of range");
        for (int i : s.test)
            require(i >= 0 && i < ds.size(), ErrorCode::Config, "test index out of range");
        return {std::move(s)};
    }
    // "all": fit on everything, nothing held out
    Split s;
    s.train.resize(ds.size());
    std::iota(s.train.begin(), s.train.end(), 0);
    return {std::move(s)};
}

TrainOutcome run_train(const ExperimentConfig &cfg, const MultiViewDataset &ds) {
    TrainOutcome out;
    out.split = resolve_splits(cfg, ds)[0];
    out.model = fit(ds, out.split.train, cfg.network, cfg.descriptor, cfg.threads, &out.report);
    out.model.config_json = dump_config(cfg);
    if (cfg.store_classifier) {
        const FeatureMatrix features =
            extract_features(out.model, ds, out.split.train, cfg.threads);
        std::vector<int> labels;
        for (int i : out.split.train)
            labels.push_back(ds.labels[i]);
        out.model.classifier =
            train_classifier(features, labels, cfg.classifier, ds.class_count);
        out.model.has_classifier = true;
    }
    return out;
}

EvalOutcome run_evaluate(const ExperimentConfig &cfg, const MultiViewDataset &ds,
                         const std::string &out_dir) {
    EvalOutcome out;
    out.splits = resolve_splits(cfg, ds);
    for (const Split &split : out.splits) {
        require(!split.test.empty(), ErrorCode::Config,
                "evaluation needs a non-empty test split");
        TrainedModel model = fit(ds, split.train, cfg.network, cfg.descriptor, cfg.threads);
        const FeatureMatrix train_features =
            extract_features(model, ds, split.train, cfg.threads);
        std::vector<int> train_labels, test_labels;
        for (int i : split.train)
            train_labels.push_back(ds.labels[i]);
        for (int i : split.test)
            test_labels.push_back(ds.labels[i]);
        const ClassifierState state =
            train_classifier(train_features, train_labels, cfg.classifier, ds.class_count);
        const FeatureMatrix test_features =
            extract_features(model, ds, split.test, cfg.threads);
        const std::vector<int> predicted = predict(state, test_features, cfg.threads);
        out.accuracies.push_back(accuracy_percent(predicted, test_labels));
    }
    const auto [mean, stddev] = mean_stddev(out.accuracies);
    out.mean = mean;
    out.stddev = stddev;

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        const std::string hash = config_hash(cfg);

        std::ofstream results(fs::path(out_dir) / "results.csv");
        check_open(results, out_dir + "/results.csv");
        results << "config,split,accuracy\n";
        for (size_t i = 0; i < out.accuracies.size(); ++i)
            results << hash << "," << i << "," << format_accuracy(out.accuracies[i]) << "\n";

        export_splits_csv((fs::path(out_dir) / "splits.csv").string(), out.splits);

        std::ofstream summary(fs::path(out_dir) / "summary.txt");
        check_open(summary, out_dir + "/summary.txt");
        std::ostringstream filters;
        for (size_t i = 0; i < cfg.network.layer_filters.size(); ++i)
            filters << (i ? "," : "") << cfg.network.layer_filters[i];
        summary << "config           " << hash << "\n"
                << "patch size       " << cfg.network.patch.l1 << "x" << cfg.network.patch.l2
                << "\n"
                << "layers           " << cfg.network.layer_filters.size() << "\n"
                << "filters          " << filters.str() << "\n"
                << "blocks           " << cfg.descriptor.blocks << "\n"
                << "overlap          " << cfg.descriptor.overlap << "\n"
                << "classifier       " << classifier_kind_name(cfg.classifier) << "\n"
                << "repetitions      " << out.splits.size() << "\n"
                << "train/test       " << out.splits[0].train.size() << "/"
                << out.splits[0].test.size() << "\n"
                << "accuracy         " << format_accuracy(out.mean) << " +/- "
                << format_accuracy(out.stddev) << "\n";
    }
    return out;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig &cfg, const MultiViewDataset &ds,
                                const std::vector<int> &l_values, const std::string &out_dir) {
    require(!l_values.empty(), ErrorCode::Argument, "no filter counts to sweep");
    std::vector<SweepRow> rows;
    for (int l : l_values) {
        ExperimentConfig swept = cfg;
        swept.network.layer_filters.assign(cfg.network.layer_filters.size(), l);
        swept.validate();

        SweepRow row;
        row.filters = l;
        // ranks from the first repetition's fit, deterministic
        ExperimentConfig first = swept;
        if (first.split.kind == "random")
            first.split.random.repetitions = 1;
        TrainOutcome probe = run_train(first, ds);
        for (const auto &layer : probe.report.layers)
            row.effective_ranks.push_back(layer.effective_rank);

        const EvalOutcome eval = run_evaluate(swept, ds, "");
        row.mean = eval.mean;
        row.stddev = eval.stddev;
        rows.push_back(std::move(row));
    }

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream csv(fs::path(out_dir) / "sweep.csv");
        check_open(csv, out_dir + "/sweep.csv");
        csv << "filters,accuracy_mean,accuracy_std,effective_ranks\n";
        for (const SweepRow &row : rows) {
            csv << row.filters << "," << format_accuracy(row.mean) << ","
                << format_accuracy(row.stddev) << ",";
            for (size_t i = 0; i < row.effective_ranks.size(); ++i)
                csv << (i ? ";" : "") << row.effective_ranks[i];
            csv << "\n";
        }

        const auto best = std::max_element(rows.begin(), rows.end(),
                                           [](const SweepRow &a, const SweepRow &b) {
                                               return a.mean < b.mean;
                                           });
        std::ofstream summary(fs::path(out_dir) / "sweep_summary.txt");
        check_open(summary, out_dir + "/sweep_summary.txt");
        summary << "classes          " << ds.class_count << "\n"
                << "best filters     " << best->filters << "\n"
                << "best accuracy    " << format_accuracy(best->mean) << " +/- "
                << format_accuracy(best->stddev) << "\n"
                << "best <= classes  " << (best->filters <= ds.class_count ? "yes" : "no")
                << "\n";
    }
    return rows;
}

void write_train_log(const std::string &path, const ExperimentConfig &cfg,
                     const FitReport &report) {
    std::ofstream out(path);
    check_open(out, path);
    out << "config " << config_hash(cfg) << "\n";
    for (size_t i = 0; i < report.layers.size(); ++i) {
        const auto &layer = report.layers[i];
        out << "layer " << i + 1 << ": filters " << cfg.network.layer_filters[i]
            << ", patch columns " << layer.patch_columns << ", effective rank "
            << layer.effective_rank << ", " << layer.seconds << " s\n"
            << "  spectrum";
        for (int j = 0; j < layer.spectrum.size(); ++j) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.6e", layer.spectrum(j));
            out << buf;
        }
        out << "\n";
    }
}

void write_features(const std::string &dir, const std::string &format,
                    const FeatureMatrix &features, const std::vector<int> &indices,
                    const TrainedModel &model) {
    require(format == "csv" || format == "bin", ErrorCode::Argument,
            "feature format must be csv or bin");
    fs::create_directories(dir);

    std::string data_file;
    if (format == "csv") {
        data_file = "features.csv";
        std::ofstream out(fs::path(dir) / data_file);
        check_open(out, dir + "/" + data_file);
        char buf[32];
        for (Eigen::Index i = 0; i < features.rows(); ++i) {
            for (Eigen::Index j = 0; j < features.cols(); ++j) {
                std::snprintf(buf, sizeof buf, "%.9g", features(i, j));
                out << (j ? "," : "") << buf;
            }
            out << "\n";
        }
    } else {
        data_file = "features.bin";
        std::ofstream out(fs::path(dir) / data_file, std::ios::binary);
        check_open(out, dir + "/" + data_file);
        out.write(reinterpret_cast<const char *>(features.data()),
                  static_cast<std::streamsize>(sizeof(float) * features.size()));
    }

    nlohmann::json meta;
    meta["data_file"] = data_file;
    meta["format"] = format;
    meta["dtype"] = "float32";
    meta["layout"] = "row-major, one sample per row";
    meta["rows"] = features.rows();
    meta["fused_length"] = model.meta.fused_length;
    meta["per_view_length"] = model.meta.per_view_length;
    meta["bit_width"] = model.meta.bit_width;
    meta["group_count"] = model.meta.group_count;
    meta["blocks"] = model.blocks.blocks;
    meta["overlap"] = model.blocks.overlap;
    meta["ordering"] = "view 1 then view 2; within a view: lineage group, then block "
                       "window, then bin value";
    meta["sample_indices"] = indices;
    if (!model.config_json.empty())
        meta["config"] = nlohmann::json::parse(model.config_json);
    std::ofstream out(fs::path(dir) / "features_meta.json");
    check_open(out, dir + "/features_meta.json");
    out << meta.dump(2) << "\n";
}

std::string model_description(const TrainedModel &model) {
    std::ostringstream out;
    out << "image size       " << model.image_rows << "x" << model.image_cols << "\n"
        << "patch size       " << model.net.patch.l1 << "x" << model.net.patch.l2 << "\n"
        << "layers           " << model.layers.size() << "\n";
    for (size_t i = 0; i < model.layers.size(); ++i) {
        const auto &bank = model.layers[i].bank;
        int rank = 0;
        if (bank.spectrum.size() > 0 && bank.spectrum(0) > 0.0)
            for (int j = 0; j < bank.spectrum.size(); ++j)
                rank += bank.spectrum(j) > 1e-8 * bank.spectrum(0);
        out << "layer " << i + 1 << "           filters " << bank.omega1.cols()
            << ", effective rank " << rank << ", eigenvalues";
        char buf[32];
        for (int j = 0; j < bank.eigenvalues.size(); ++j) {
            std::snprintf(buf, sizeof buf, " %.4e", bank.eigenvalues(j));
            out << buf;
        }
        out << "\n";
    }
    out << "blocks           " << model.blocks.blocks << " (overlap " << model.blocks.overlap
        << ")\n"
        << "bit width        " << model.meta.bit_width << "\n"
        << "groups per view  " << model.meta.group_count << "\n"
        << "descriptor       " << model.meta.per_view_length << " per view, "
        << model.meta.fused_length << " fused\n"
        << "classes          " << model.class_count << "\n"
        << "classifier       "
        << (model.has_classifier ? classifier_kind_name(model.classifier.kind) : "none") << "\n";
    return out.str();
}

} // namespace odmtc
