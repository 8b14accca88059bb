#include "odmtc.h"

#include "core/common.hpp"
#include "core/config.hpp"
#include "core/experiment.hpp"
#include "core/model_io.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

using namespace odmtc;

struct odmtc_config {
    ExperimentConfig cfg;
};
struct odmtc_dataset {
    MultiViewDataset ds;
};
struct odmtc_model {
    TrainedModel model;
};
struct odmtc_eval {
    EvalOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

odmtc_status to_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::Io:
        return ODMTC_ERR_IO;
    case ErrorCode::Config:
        return ODMTC_ERR_CONFIG;
    case ErrorCode::Argument:
        return ODMTC_ERR_ARGUMENT;
    case ErrorCode::Data:
        return ODMTC_ERR_DATA;
    case ErrorCode::Numeric:
        return ODMTC_ERR_NUMERIC;
    default:
        return ODMTC_ERR_INTERNAL;
    }
}

// runs fn, translating exceptions into status codes + the thread-local message
template <typename Fn>
odmtc_status guarded(Fn &&fn) {
    try {
        fn();
        g_last_error.clear();
        return ODMTC_OK;
    } catch (const Error &e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc &) {
        g_last_error = "out of memory";
        return ODMTC_ERR_INTERNAL;
    } catch (const std::exception &e) {
        g_last_error = e.what();
        return ODMTC_ERR_INTERNAL;
    }
}

odmtc_status invalid_argument(const char *msg) {
    g_last_error = msg;
    return ODMTC_ERR_ARGUMENT;
}

char *copy_string(const std::string &s) {
    char *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (out)
        std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char *odmtc_version(void) { return "1.0.0"; }

const char *odmtc_status_name(odmtc_status s) {
    switch (s) {
    case ODMTC_OK:
        return "ok";
    case ODMTC_ERR_IO:
        return "io error";
    case ODMTC_ERR_CONFIG:
        return "config error";
    case ODMTC_ERR_ARGUMENT:
        return "invalid argument";
    case ODMTC_ERR_DATA:
        return "data error";
    case ODMTC_ERR_NUMERIC:
        return "numeric error";
    default:
        return "internal error";
    }
}

const char *odmtc_last_error(void) { return g_last_error.c_str(); }

odmtc_status odmtc_config_open(const char *path, odmtc_config **out) {
    if (!path || !out)
        return invalid_argument("null argument");
    return guarded([&] { *out = new odmtc_config{load_config(path)}; });
}

odmtc_status odmtc_config_from_json(const char *json_text, odmtc_config **out) {
    if (!json_text || !out)
        return invalid_argument("null argument");
    return guarded([&] { *out = new odmtc_config{parse_config(json_text)}; });
}

odmtc_status odmtc_config_to_json(const odmtc_config *cfg, char **out_text) {
    if (!cfg || !out_text)
        return invalid_argument("null argument");
    return guarded([&] { *out_text = copy_string(dump_config(cfg->cfg)); });
}

odmtc_status odmtc_config_set_seed(odmtc_config *cfg, uint64_t seed) {
    if (!cfg)
        return invalid_argument("null config");
    cfg->cfg.split.random.rng_seed = seed;
    return ODMTC_OK;
}

odmtc_status odmtc_config_set_threads(odmtc_config *cfg, int32_t threads) {
    if (!cfg || threads < 0)
        return invalid_argument("threads must be >= 0");
    cfg->cfg.threads = threads;
    return ODMTC_OK;
}

odmtc_status odmtc_config_set_filters(odmtc_config *cfg, const int32_t *filters, int32_t count,
                                      int32_t uniform) {
    if (!cfg || !filters || count < 1)
        return invalid_argument("null or empty filter list");
    return guarded([&] {
        std::vector<int> values(filters, filters + count);
        if (uniform) {
            cfg->cfg.network.layer_filters.assign(cfg->cfg.network.layer_filters.size(),
                                                  values[0]);
        } else {
            require(values.size() == cfg->cfg.network.layer_filters.size(), ErrorCode::Config,
                    "filter list length must match the layer count");
            cfg->cfg.network.layer_filters = values;
        }
        cfg->cfg.validate();
    });
}

void odmtc_config_close(odmtc_config *cfg) { delete cfg; }

void odmtc_string_free(char *s) { std::free(s); }

odmtc_status odmtc_dataset_open(const odmtc_config *cfg, odmtc_dataset **out) {
    if (!cfg || !out)
        return invalid_argument("null argument");
    return guarded([&] { *out = new odmtc_dataset{dataset_from_config(cfg->cfg)}; });
}

odmtc_status odmtc_dataset_get_info(const odmtc_dataset *ds, odmtc_dataset_info *out) {
    if (!ds || !out)
        return invalid_argument("null argument");
    out->sample_count = ds->ds.size();
    out->class_count = ds->ds.class_count;
    out->image_rows = ds->ds.rows();
    out->image_cols = ds->ds.cols();
    return ODMTC_OK;
}

odmtc_status odmtc_dataset_label(const odmtc_dataset *ds, int32_t index, int32_t *out) {
    if (!ds || !out)
        return invalid_argument("null argument");
    if (index < 0 || index >= ds->ds.size())
        return invalid_argument("sample index out of range");
    *out = ds->ds.labels[index];
    return ODMTC_OK;
}

void odmtc_dataset_close(odmtc_dataset *ds) { delete ds; }

odmtc_status odmtc_split_indices(const odmtc_config *cfg, const odmtc_dataset *ds,
                                 int32_t repetition, int32_t role, int32_t **out_indices,
                                 int32_t *out_count) {
    if (!cfg || !ds || !out_indices || !out_count)
        return invalid_argument("null argument");
    return guarded([&] {
        const std::vector<Split> splits = resolve_splits(cfg->cfg, ds->ds);
        require(repetition >= 0 && repetition < static_cast<int32_t>(splits.size()),
                ErrorCode::Argument, "repetition out of range");
        require(role == 0 || role == 1, ErrorCode::Argument, "role must be 0 or 1");
        const std::vector<int> &idx =
            role == 0 ? splits[repetition].train : splits[repetition].test;
        int32_t *buf = static_cast<int32_t *>(std::malloc(sizeof(int32_t) * idx.size()));
        require(buf != nullptr, ErrorCode::Internal, "out of memory");
        std::memcpy(buf, idx.data(), sizeof(int32_t) * idx.size());
        *out_indices = buf;
        *out_count = static_cast<int32_t>(idx.size());
    });
}

odmtc_status odmtc_train(const odmtc_config *cfg, const odmtc_dataset *ds, const char *log_path,
                         odmtc_model **out) {
    if (!cfg || !ds || !out)
        return invalid_argument("null argument");
    return guarded([&] {
        TrainOutcome outcome = run_train(cfg->cfg, ds->ds);
        if (log_path)
            write_train_log(log_path, cfg->cfg, outcome.report);
        *out = new odmtc_model{std::move(outcome.model)};
    });
}

odmtc_status odmtc_model_save(const odmtc_model *m, const char *path) {
    if (!m || !path)
        return invalid_argument("null argument");
    return guarded([&] { save_model(m->model, path); });
}

odmtc_status odmtc_model_open(const char *path, odmtc_model **out) {
    if (!path || !out)
        return invalid_argument("null argument");
    return guarded([&] { *out = new odmtc_model{load_model(path)}; });
}

odmtc_status odmtc_model_describe(const odmtc_model *m, char **out_text) {
    if (!m || !out_text)
        return invalid_argument("null argument");
    return guarded([&] { *out_text = copy_string(model_description(m->model)); });
}

odmtc_status odmtc_model_descriptor_dim(const odmtc_model *m, int64_t *out_dim) {
    if (!m || !out_dim)
        return invalid_argument("null argument");
    *out_dim = m->model.meta.fused_length;
    return ODMTC_OK;
}

void odmtc_model_close(odmtc_model *m) { delete m; }

odmtc_status odmtc_predict(const odmtc_model *m, const odmtc_dataset *ds,
                           const int32_t *indices, int32_t count, int32_t **out_labels) {
    if (!m || !ds || !indices || count < 1 || !out_labels)
        return invalid_argument("null or empty argument");
    return guarded([&] {
        require(m->model.has_classifier, ErrorCode::Argument,
                "model carries no classifier state");
        std::vector<int> idx(indices, indices + count);
        const FeatureMatrix features = extract_features(m->model, ds->ds, idx);
        const std::vector<int> labels = predict(m->model.classifier, features);
        int32_t *buf = static_cast<int32_t *>(std::malloc(sizeof(int32_t) * labels.size()));
        require(buf != nullptr, ErrorCode::Internal, "out of memory");
        std::memcpy(buf, labels.data(), sizeof(int32_t) * labels.size());
        *out_labels = buf;
    });
}

odmtc_status odmtc_extract(const odmtc_model *m, const odmtc_dataset *ds, const int32_t *indices,
                           int32_t count, float **out_data, int64_t *out_dim) {
    if (!m || !ds || !indices || count < 1 || !out_data || !out_dim)
        return invalid_argument("null or empty argument");
    return guarded([&] {
        std::vector<int> idx(indices, indices + count);
        const FeatureMatrix features = extract_features(m->model, ds->ds, idx);
        float *buf = static_cast<float *>(std::malloc(sizeof(float) * features.size()));
        require(buf != nullptr, ErrorCode::Internal, "out of memory");
        std::memcpy(buf, features.data(), sizeof(float) * features.size());
        *out_data = buf;
        *out_dim = features.cols();
    });
}

void odmtc_buffer_free(void *p) { std::free(p); }

odmtc_status odmtc_evaluate(const odmtc_config *cfg, const odmtc_dataset *ds, const char *out_dir,
                            odmtc_eval **out) {
    if (!cfg || !ds || !out)
        return invalid_argument("null argument");
    return guarded([&] {
        *out = new odmtc_eval{run_evaluate(cfg->cfg, ds->ds, out_dir ? out_dir : "")};
    });
}

int32_t odmtc_eval_split_count(const odmtc_eval *e) {
    return e ? static_cast<int32_t>(e->outcome.accuracies.size()) : 0;
}

double odmtc_eval_accuracy(const odmtc_eval *e, int32_t split) {
    if (!e || split < 0 || split >= static_cast<int32_t>(e->outcome.accuracies.size()))
        return -1.0;
    return e->outcome.accuracies[split];
}

double odmtc_eval_mean(const odmtc_eval *e) { return e ? e->outcome.mean : -1.0; }

double odmtc_eval_stddev(const odmtc_eval *e) { return e ? e->outcome.stddev : -1.0; }

void odmtc_eval_close(odmtc_eval *e) { delete e; }

odmtc_status odmtc_sweep_filters(const odmtc_config *cfg, const odmtc_dataset *ds,
                                 const int32_t *l_values, int32_t count, const char *out_dir) {
    if (!cfg || !ds || !l_values || count < 1)
        return invalid_argument("null or empty argument");
    return guarded([&] {
        std::vector<int> values(l_values, l_values + count);
        run_sweep(cfg->cfg, ds->ds, values, out_dir ? out_dir : "");
    });
}

} // extern "C"
