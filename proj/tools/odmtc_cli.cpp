// Experiment front end. Everything goes through the shared library's C API;
// this binary only parses arguments and moves files around.
#include "odmtc.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct ConfigCloser {
    void operator()(odmtc_config *p) const { odmtc_config_close(p); }
};
struct DatasetCloser {
    void operator()(odmtc_dataset *p) const { odmtc_dataset_close(p); }
};
struct ModelCloser {
    void operator()(odmtc_model *p) const { odmtc_model_close(p); }
};
struct EvalCloser {
    void operator()(odmtc_eval *p) const { odmtc_eval_close(p); }
};

using ConfigPtr = std::unique_ptr<odmtc_config, ConfigCloser>;
using DatasetPtr = std::unique_ptr<odmtc_dataset, DatasetCloser>;
using ModelPtr = std::unique_ptr<odmtc_model, ModelCloser>;
using EvalPtr = std::unique_ptr<odmtc_eval, EvalCloser>;

[[noreturn]] void die(odmtc_status status) {
    std::cerr << "error (" << odmtc_status_name(status) << "): " << odmtc_last_error() << "\n";
    std::exit(1);
}

void check(odmtc_status status) {
    if (status != ODMTC_OK)
        die(status);
}

ConfigPtr open_config(const std::string &path, int threads, int64_t seed, bool seed_set) {
    odmtc_config *cfg = nullptr;
    check(odmtc_config_open(path.c_str(), &cfg));
    ConfigPtr out(cfg);
    if (threads >= 0)
        check(odmtc_config_set_threads(out.get(), threads));
    if (seed_set)
        check(odmtc_config_set_seed(out.get(), static_cast<uint64_t>(seed)));
    return out;
}

DatasetPtr open_dataset(const ConfigPtr &cfg) {
    odmtc_dataset *ds = nullptr;
    check(odmtc_dataset_open(cfg.get(), &ds));
    return DatasetPtr(ds);
}

std::vector<int32_t> parse_index_list(const std::string &text) {
    std::vector<int32_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(std::stoi(item));
    return out;
}

std::vector<int32_t> resolve_sample_set(const ConfigPtr &cfg, const DatasetPtr &ds,
                                        const std::string &set, int rep) {
    if (set == "all") {
        odmtc_dataset_info info;
        check(odmtc_dataset_get_info(ds.get(), &info));
        std::vector<int32_t> idx(info.sample_count);
        for (int32_t i = 0; i < info.sample_count; ++i)
            idx[i] = i;
        return idx;
    }
    if (set == "train" || set == "test") {
        int32_t *buf = nullptr;
        int32_t count = 0;
        check(odmtc_split_indices(cfg.get(), ds.get(), rep, set == "train" ? 0 : 1, &buf,
                                  &count));
        std::vector<int32_t> idx(buf, buf + count);
        odmtc_buffer_free(buf);
        return idx;
    }
    return parse_index_list(set);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"odmtc — multi-view convolutional feature extraction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(odmtc_version()));

    std::string config_path, model_path, out_dir = "out";
    int threads = -1;
    int64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App *cmd, bool needs_config) {
        auto *opt = cmd->add_option("--config", config_path, "experiment config (JSON)");
        if (needs_config)
            opt->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
        cmd->add_option("--seed", seed, "override the split seed")
            ->each([&](const std::string &) { seed_set = true; });
    };

    auto *train = app.add_subcommand("train", "fit filter banks and save the model");
    add_common(train, true);
    train->add_option("--model", model_path, "model output path (default <out>/model.odmc)");

    auto *eval = app.add_subcommand("eval", "run the split protocol and report accuracy");
    add_common(eval, true);

    auto *sweep = app.add_subcommand("sweep-filters", "evaluate across filter counts");
    add_common(sweep, true);
    std::string l_values = "2,4,8";
    sweep->add_option("--l-values", l_values, "comma-separated filter counts");

    auto *extract = app.add_subcommand("extract", "write fused descriptors for samples");
    add_common(extract, true);
    extract->add_option("--model", model_path, "trained model file")->required();
    std::string sample_set = "all";
    extract->add_option("--set", sample_set,
                        "all | train | test | comma-separated indices");
    int rep = 0;
    extract->add_option("--rep", rep, "repetition for train/test sets");
    std::string format = "csv";
    extract->add_option("--format", format, "csv | bin")
        ->check(CLI::IsMember({"csv", "bin"}));

    auto *inspect = app.add_subcommand("inspect-model", "print a model summary");
    inspect->add_option("--model", model_path, "trained model file")->required();

    CLI11_PARSE(app, argc, argv);

    if (inspect->parsed()) {
        odmtc_model *raw = nullptr;
        check(odmtc_model_open(model_path.c_str(), &raw));
        ModelPtr model(raw);
        char *text = nullptr;
        check(odmtc_model_describe(model.get(), &text));
        std::cout << text;
        odmtc_string_free(text);
        return 0;
    }

    ConfigPtr cfg = open_config(config_path, threads, seed, seed_set);
    DatasetPtr ds = open_dataset(cfg);

    if (train->parsed()) {
        fs::create_directories(out_dir);
        const std::string model_out =
            model_path.empty() ? (fs::path(out_dir) / "model.odmc").string() : model_path;
        const std::string log_out = (fs::path(out_dir) / "train_log.txt").string();
        odmtc_model *raw = nullptr;
        check(odmtc_train(cfg.get(), ds.get(), log_out.c_str(), &raw));
        ModelPtr model(raw);
        check(odmtc_model_save(model.get(), model_out.c_str()));
        char *text = nullptr;
        check(odmtc_model_describe(model.get(), &text));
        std::cout << text << "model written to " << model_out << "\n";
        odmtc_string_free(text);
        return 0;
    }

    if (eval->parsed()) {
        odmtc_eval *raw = nullptr;
        check(odmtc_evaluate(cfg.get(), ds.get(), out_dir.c_str(), &raw));
        EvalPtr result(raw);
        const int32_t n = odmtc_eval_split_count(result.get());
        for (int32_t i = 0; i < n; ++i)
            std::printf("split %d: %.4f\n", i, odmtc_eval_accuracy(result.get(), i));
        std::printf("accuracy: %.4f +/- %.4f over %d repetition(s)\n",
                    odmtc_eval_mean(result.get()), odmtc_eval_stddev(result.get()), n);
        std::cout << "results written to " << out_dir << "\n";
        return 0;
    }

    if (sweep->parsed()) {
        const std::vector<int32_t> values = parse_index_list(l_values);
        if (values.empty()) {
            std::cerr << "error: no filter counts given\n";
            return 1;
        }
        check(odmtc_sweep_filters(cfg.get(), ds.get(), values.data(),
                                  static_cast<int32_t>(values.size()), out_dir.c_str()));
        std::cout << "sweep written to " << out_dir << "\n";
        return 0;
    }

    if (extract->parsed()) {
        odmtc_model *raw = nullptr;
        check(odmtc_model_open(model_path.c_str(), &raw));
        ModelPtr model(raw);
        const std::vector<int32_t> idx = resolve_sample_set(cfg, ds, sample_set, rep);
        if (idx.empty()) {
            std::cerr << "error: empty sample set\n";
            return 1;
        }
        float *data = nullptr;
        int64_t dim = 0;
        check(odmtc_extract(model.get(), ds.get(), idx.data(),
                            static_cast<int32_t>(idx.size()), &data, &dim));
        fs::create_directories(out_dir);
        // write via the library's canonical writer? the C surface hands back
        // raw rows; the CLI owns the file layout for extraction
        const std::string data_path =
            (fs::path(out_dir) / (format == "csv" ? "features.csv" : "features.bin")).string();
        if (format == "csv") {
            std::FILE *f = std::fopen(data_path.c_str(), "w");
            if (!f) {
                std::cerr << "error: cannot write " << data_path << "\n";
                return 1;
            }
            for (size_t i = 0; i < idx.size(); ++i) {
                for (int64_t j = 0; j < dim; ++j)
                    std::fprintf(f, "%s%.9g", j ? "," : "",
                                 static_cast<double>(data[i * dim + j]));
                std::fputc('\n', f);
            }
            std::fclose(f);
        } else {
            std::FILE *f = std::fopen(data_path.c_str(), "wb");
            if (!f) {
                std::cerr << "error: cannot write " << data_path << "\n";
                return 1;
            }
            std::fwrite(data, sizeof(float), static_cast<size_t>(idx.size()) * dim, f);
            std::fclose(f);
        }
        odmtc_buffer_free(data);

        char *cfg_text = nullptr;
        check(odmtc_config_to_json(cfg.get(), &cfg_text));
        std::ofstream meta(fs::path(out_dir) / "features_meta.json");
        meta << "{\n  \"data_file\": \"" << (format == "csv" ? "features.csv" : "features.bin")
             << "\",\n  \"format\": \"" << format << "\",\n  \"dtype\": \"float32\",\n"
             << "  \"rows\": " << idx.size() << ",\n  \"fused_length\": " << dim << ",\n"
             << "  \"sample_indices\": [";
        for (size_t i = 0; i < idx.size(); ++i)
            meta << (i ? "," : "") << idx[i];
        meta << "],\n  \"config\": " << cfg_text << "\n}\n";
        odmtc_string_free(cfg_text);
        std::cout << idx.size() << " x " << dim << " descriptors written to " << data_path
                  << "\n";
        return 0;
    }

    return 0;
}
