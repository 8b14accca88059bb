#include "core/config.hpp"

#include "core/common.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

using nlohmann::json;

namespace odmtc {

namespace {

void reject_unknown(const json &obj, const std::set<std::string> &allowed,
                    const std::string &where) {
    for (const auto &item : obj.items())
        require(allowed.count(item.key()) > 0, ErrorCode::Config,
                "unknown key \"" + item.key() + "\" in " + where);
}

int get_int(const json &obj, const char *key, int fallback) {
    if (!obj.contains(key))
        return fallback;
    require(obj[key].is_number_integer(), ErrorCode::Config,
            std::string(key) + " must be an integer");
    return obj[key].get<int>();
}

std::vector<int> get_int_list(const json &obj, const char *key) {
    require(obj.contains(key) && obj[key].is_array(), ErrorCode::Config,
            std::string(key) + " must be an array of integers");
    std::vector<int> out;
    for (const auto &v : obj[key]) {
        require(v.is_number_integer(), ErrorCode::Config,
                std::string(key) + " must contain integers only");
        out.push_back(v.get<int>());
    }
    return out;
}

void parse_pair(const json &obj, const char *key, int &first, int &second) {
    const auto list = get_int_list(obj, key);
    require(list.size() == 2, ErrorCode::Config, std::string(key) + " must have 2 entries");
    first = list[0];
    second = list[1];
}

} // namespace

ExperimentConfig parse_config(const std::string &json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception &e) {
        fail(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
    }
    require(root.is_object(), ErrorCode::Config, "config root must be an object");
    reject_unknown(root,
                   {"dataset", "network", "descriptor", "split", "classifier", "threads",
                    "store_classifier"},
                   "config root");

    ExperimentConfig cfg;

    require(root.contains("dataset") && root["dataset"].is_object(), ErrorCode::Config,
            "dataset section required");
    const json &ds = root["dataset"];
    reject_unknown(ds, {"kind", "root", "resize", "csv", "view2"}, "dataset");
    cfg.dataset.kind = ds.value("kind", "image-dirs");
    if (cfg.dataset.kind == "image-dirs") {
        require(ds.contains("root") && ds["root"].is_string(), ErrorCode::Config,
                "dataset.root required for image-dirs");
        cfg.dataset.root = ds["root"].get<std::string>();
        if (ds.contains("resize"))
            parse_pair(ds, "resize", cfg.dataset.resize_rows, cfg.dataset.resize_cols);
    } else if (cfg.dataset.kind == "csv") {
        require(ds.contains("csv") && ds["csv"].is_object(), ErrorCode::Config,
                "dataset.csv section required for csv datasets");
        const json &c = ds["csv"];
        reject_unknown(c, {"features", "labels", "map"}, "dataset.csv");
        require(c.contains("features") && c.contains("labels") && c.contains("map"),
                ErrorCode::Config, "dataset.csv needs features, labels and map");
        cfg.dataset.csv_features = c["features"].get<std::string>();
        cfg.dataset.csv_labels = c["labels"].get<std::string>();
        parse_pair(c, "map", cfg.dataset.map_rows, cfg.dataset.map_cols);
    } else {
        fail(ErrorCode::Config, "dataset.kind must be image-dirs or csv");
    }

    require(ds.contains("view2") && ds["view2"].is_object(), ErrorCode::Config,
            "dataset.view2 section required");
    const json &v2 = ds["view2"];
    reject_unknown(v2, {"kind", "levels", "channels", "features", "map"}, "dataset.view2");
    require(v2.contains("kind") && v2["kind"].is_string(), ErrorCode::Config,
            "dataset.view2.kind required");
    cfg.dataset.view2_kind = v2["kind"].get<std::string>();
    if (cfg.dataset.view2_kind == "wavelet") {
        cfg.dataset.wavelet_levels = get_int(v2, "levels", 2);
    } else if (cfg.dataset.view2_kind == "channel-split") {
        if (v2.contains("channels"))
            parse_pair(v2, "channels", cfg.dataset.channel_first, cfg.dataset.channel_second);
    } else if (cfg.dataset.view2_kind == "csv") {
        require(v2.contains("features"), ErrorCode::Config,
                "dataset.view2.features required for csv views");
        cfg.dataset.view2_csv_features = v2["features"].get<std::string>();
    } else {
        require(cfg.dataset.view2_kind == "lbp", ErrorCode::Config,
                "dataset.view2.kind must be lbp, wavelet, channel-split or csv");
    }

    require(root.contains("network") && root["network"].is_object(), ErrorCode::Config,
            "network section required");
    const json &net = root["network"];
    reject_unknown(net, {"patch", "filters"}, "network");
    parse_pair(net, "patch", cfg.network.patch.l1, cfg.network.patch.l2);
    cfg.network.layer_filters = get_int_list(net, "filters");

    require(root.contains("descriptor") && root["descriptor"].is_object(), ErrorCode::Config,
            "descriptor section required");
    const json &desc = root["descriptor"];
    reject_unknown(desc, {"blocks", "overlap"}, "descriptor");
    cfg.descriptor.blocks = get_int(desc, "blocks", 8);
    if (desc.contains("overlap")) {
        require(desc["overlap"].is_number(), ErrorCode::Config, "overlap must be a number");
        cfg.descriptor.overlap = desc["overlap"].get<double>();
    }

    require(root.contains("split") && root["split"].is_object(), ErrorCode::Config,
            "split section required");
    const json &sp = root["split"];
    reject_unknown(sp, {"kind", "train_count", "repetitions", "seed", "stratified", "train",
                        "test"},
                   "split");
    cfg.split.kind = sp.value("kind", "random");
    if (cfg.split.kind == "random") {
        cfg.split.random.train_count = get_int(sp, "train_count", 0);
        cfg.split.random.repetitions = get_int(sp, "repetitions", 1);
        if (sp.contains("seed")) {
            require(sp["seed"].is_number_unsigned() || sp["seed"].is_number_integer(),
                    ErrorCode::Config, "seed must be an integer");
            cfg.split.random.rng_seed = sp["seed"].get<uint64_t>();
        }
        if (sp.contains("stratified")) {
            require(sp["stratified"].is_boolean(), ErrorCode::Config,
                    "stratified must be a boolean");
            cfg.split.random.stratified = sp["stratified"].get<bool>();
        }
    } else if (cfg.split.kind == "indices") {
        cfg.split.train_indices = get_int_list(sp, "train");
        cfg.split.test_indices = get_int_list(sp, "test");
    } else {
        require(cfg.split.kind == "all", ErrorCode::Config,
                "split.kind must be random, indices or all");
    }

    if (root.contains("classifier")) {
        const json &cl = root["classifier"];
        require(cl.is_object(), ErrorCode::Config, "classifier must be an object");
        reject_unknown(cl, {"kind"}, "classifier");
        cfg.classifier = classifier_kind_from_string(cl.value("kind", "nn-cosine"));
    }
    cfg.threads = get_int(root, "threads", 0);
    if (root.contains("store_classifier")) {
        require(root["store_classifier"].is_boolean(), ErrorCode::Config,
                "store_classifier must be a boolean");
        cfg.store_classifier = root["store_classifier"].get<bool>();
    }

    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    network.validate();
    descriptor.validate();
    require(threads >= 0, ErrorCode::Config, "threads must be >= 0");

    if (dataset.kind == "csv")
        require(dataset.map_rows > 0 && dataset.map_cols > 0, ErrorCode::Config,
                "dataset.csv.map must be positive");
    if (dataset.view2_kind == "wavelet")
        require(dataset.wavelet_levels >= 1, ErrorCode::Config, "wavelet levels must be >= 1");
    if (dataset.view2_kind == "channel-split") {
        require(dataset.kind == "image-dirs", ErrorCode::Config,
                "channel-split views need image input");
        require(dataset.channel_first != dataset.channel_second, ErrorCode::Config,
                "channel-split channels must differ");
        require(dataset.channel_first >= 0 && dataset.channel_first < 3 &&
                    dataset.channel_second >= 0 && dataset.channel_second < 3,
                ErrorCode::Config, "channels must be 0 (R), 1 (G) or 2 (B)");
    }

    if (split.kind == "random") {
        require(split.random.train_count > 0, ErrorCode::Config,
                "split.train_count must be positive");
        require(split.random.repetitions >= 1, ErrorCode::Config,
                "split.repetitions must be >= 1");
    } else if (split.kind == "indices") {
        require(!split.train_indices.empty() && !split.test_indices.empty(), ErrorCode::Config,
                "split.train and split.test must be non-empty");
    }

    // keep the descriptor within sane memory bounds
    const int bit_width = network.layer_filters.back();
    require(bit_width <= 24, ErrorCode::Config,
            "final layer width above 24 bits is not supported (descriptor would have 2^" +
                std::to_string(bit_width) + " bins per block)");
    long long groups = 1;
    for (size_t i = 0; i + 1 < network.layer_filters.size(); ++i)
        groups *= network.layer_filters[i];
    const long long per_view = (1ll << bit_width) * groups * descriptor.blocks;
    require(per_view <= (1ll << 24), ErrorCode::Config,
            "descriptor length " + std::to_string(2 * per_view) +
                " exceeds the supported maximum of " + std::to_string(2ll << 24));
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Io, "cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig &cfg) {
    json ds;
    ds["kind"] = cfg.dataset.kind;
    if (cfg.dataset.kind == "image-dirs") {
        ds["root"] = cfg.dataset.root;
        if (cfg.dataset.resize_rows > 0)
            ds["resize"] = {cfg.dataset.resize_rows, cfg.dataset.resize_cols};
    } else {
        ds["csv"] = {{"features", cfg.dataset.csv_features},
                     {"labels", cfg.dataset.csv_labels},
                     {"map", {cfg.dataset.map_rows, cfg.dataset.map_cols}}};
    }
    json v2;
    v2["kind"] = cfg.dataset.view2_kind;
    if (cfg.dataset.view2_kind == "wavelet")
        v2["levels"] = cfg.dataset.wavelet_levels;
    else if (cfg.dataset.view2_kind == "channel-split")
        v2["channels"] = {cfg.dataset.channel_first, cfg.dataset.channel_second};
    else if (cfg.dataset.view2_kind == "csv")
        v2["features"] = cfg.dataset.view2_csv_features;
    ds["view2"] = v2;

    json sp;
    sp["kind"] = cfg.split.kind;
    if (cfg.split.kind == "random") {
        sp["train_count"] = cfg.split.random.train_count;
        sp["repetitions"] = cfg.split.random.repetitions;
        sp["seed"] = cfg.split.random.rng_seed;
        sp["stratified"] = cfg.split.random.stratified;
    } else if (cfg.split.kind == "indices") {
        sp["train"] = cfg.split.train_indices;
        sp["test"] = cfg.split.test_indices;
    }

    json root;
    root["dataset"] = ds;
    root["network"] = {{"patch", {cfg.network.patch.l1, cfg.network.patch.l2}},
                       {"filters", cfg.network.layer_filters}};
    root["descriptor"] = {{"blocks", cfg.descriptor.blocks},
                          {"overlap", cfg.descriptor.overlap}};
    root["split"] = sp;
    root["classifier"] = {{"kind", classifier_kind_name(cfg.classifier)}};
    root["threads"] = cfg.threads;
    root["store_classifier"] = cfg.store_classifier;
    return root.dump(2);
}

std::string config_hash(const ExperimentConfig &cfg) {
    const std::string text = dump_config(cfg);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace odmtc
