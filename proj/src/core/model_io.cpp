#include "core/model_io.hpp"

#include "core/common.hpp"

#include <cstring>
#include <fstream>

static_assert(__BYTE_ORDER__ == __ORDER_LITTLE_ENDIAN__,
              "model container writes native little-endian words");

namespace odmtc {

namespace {

constexpr char kMagic[4] = {'O', 'D', 'M', 'C'};
constexpr uint32_t kVersion = 1;

struct Writer {
    std::ofstream out;
    explicit Writer(const std::string &path) : out(path, std::ios::binary) {
        require(out.good(), ErrorCode::Io, "cannot write model file: " + path);
    }
    void bytes(const void *p, size_t n) { out.write(static_cast<const char *>(p), n); }
    void u8(uint8_t v) { bytes(&v, 1); }
    void u32(uint32_t v) { bytes(&v, 4); }
    void u64(uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    void str(const std::string &s) {
        u32(static_cast<uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void mat(const Eigen::MatrixXd &m) { bytes(m.data(), sizeof(double) * m.size()); }
    void vec(const Eigen::VectorXd &v) { bytes(v.data(), sizeof(double) * v.size()); }
};

struct Reader {
    std::ifstream in;
    std::string path;
    explicit Reader(const std::string &p) : in(p, std::ios::binary), path(p) {
        require(in.good(), ErrorCode::Io, "cannot open model file: " + p);
    }
    void bytes(void *p, size_t n) {
        in.read(static_cast<char *>(p), static_cast<std::streamsize>(n));
        require(static_cast<size_t>(in.gcount()) == n, ErrorCode::Io,
                "truncated model file: " + path);
    }
    uint8_t u8() {
        uint8_t v;
        bytes(&v, 1);
        return v;
    }
    uint32_t u32() {
        uint32_t v;
        bytes(&v, 4);
        return v;
    }
    uint64_t u64() {
        uint64_t v;
        bytes(&v, 8);
        return v;
    }
    double f64() {
        double v;
        bytes(&v, 8);
        return v;
    }
    std::string str() {
        std::string s(u32(), '\0');
        bytes(s.data(), s.size());
        return s;
    }
    void mat(Eigen::MatrixXd &m, long rows, long cols) {
        m.resize(rows, cols);
        bytes(m.data(), sizeof(double) * m.size());
    }
    void vec(Eigen::VectorXd &v, long n) {
        v.resize(n);
        bytes(v.data(), sizeof(double) * v.size());
    }
};

} // namespace

void save_model(const TrainedModel &model, const std::string &path) {
    Writer w(path);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.u64(model.config_json.size());
    w.bytes(model.config_json.data(), model.config_json.size());
    w.u32(model.net.patch.l1);
    w.u32(model.net.patch.l2);
    w.u32(static_cast<uint32_t>(model.layers.size()));
    w.u32(model.image_rows);
    w.u32(model.image_cols);
    w.u32(model.class_count);
    w.u32(static_cast<uint32_t>(model.class_names.size()));
    for (const auto &name : model.class_names)
        w.str(name);
    for (const LayerState &layer : model.layers) {
        w.u32(static_cast<uint32_t>(layer.bank.omega1.cols()));
        w.u32(static_cast<uint32_t>(layer.bank.omega1.rows()));
        w.vec(layer.bank.eigenvalues);
        w.vec(layer.bank.spectrum);
        w.vec(layer.mean1);
        w.vec(layer.mean2);
        w.mat(layer.bank.omega1);
        w.mat(layer.bank.omega2);
    }
    w.u32(model.blocks.blocks);
    w.f64(model.blocks.overlap);
    w.u32(model.meta.bit_width);
    w.u64(static_cast<uint64_t>(model.meta.group_count));
    w.u64(static_cast<uint64_t>(model.meta.per_view_length));
    w.u64(static_cast<uint64_t>(model.meta.fused_length));
    w.u8(model.has_classifier ? 1 : 0);
    if (model.has_classifier) {
        const ClassifierState &cl = model.classifier;
        w.u8(cl.kind == ClassifierKind::NnCosine ? 0 : 1);
        w.u32(cl.class_count);
        if (cl.kind == ClassifierKind::NnCosine) {
            w.u64(static_cast<uint64_t>(cl.train_features.rows()));
            w.u64(static_cast<uint64_t>(cl.train_features.cols()));
            w.bytes(cl.train_labels.data(), sizeof(int32_t) * cl.train_labels.size());
            w.bytes(cl.train_features.data(), sizeof(float) * cl.train_features.size());
        } else {
            w.u64(static_cast<uint64_t>(cl.weights.rows()));
            w.u32(static_cast<uint32_t>(cl.weights.cols()));
            w.mat(cl.weights);
            w.vec(cl.bias);
        }
    }
    w.out.flush();
    require(w.out.good(), ErrorCode::Io, "write failed: " + path);
}

TrainedModel load_model(const std::string &path) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4);
    require(std::memcmp(magic, kMagic, 4) == 0, ErrorCode::Io,
            "not a model file (bad magic): " + path);
    const uint32_t version = r.u32();
    require(version == kVersion, ErrorCode::Io,
            "unsupported model version " + std::to_string(version) + ": " + path);

    TrainedModel model;
    model.config_json.resize(r.u64());
    r.bytes(model.config_json.data(), model.config_json.size());
    model.net.patch.l1 = static_cast<int>(r.u32());
    model.net.patch.l2 = static_cast<int>(r.u32());
    const uint32_t layer_count = r.u32();
    model.image_rows = static_cast<int>(r.u32());
    model.image_cols = static_cast<int>(r.u32());
    model.class_count = static_cast<int>(r.u32());
    model.class_names.resize(r.u32());
    for (auto &name : model.class_names)
        name = r.str();

    model.net.layer_filters.clear();
    for (uint32_t i = 0; i < layer_count; ++i) {
        const uint32_t filters = r.u32();
        const uint32_t dim = r.u32();
        require(dim == static_cast<uint32_t>(model.net.patch.dim()), ErrorCode::Io,
                "model layer dimension mismatch: " + path);
        LayerState layer;
        r.vec(layer.bank.eigenvalues, filters);
        r.vec(layer.bank.spectrum, dim);
        r.vec(layer.mean1, dim);
        r.vec(layer.mean2, dim);
        r.mat(layer.bank.omega1, dim, filters);
        r.mat(layer.bank.omega2, dim, filters);
        layer.bank.layer_index = static_cast<int>(i);
        reshape_filters(layer.bank, model.net.patch);
        model.net.layer_filters.push_back(static_cast<int>(filters));
        model.layers.push_back(std::move(layer));
    }

    model.blocks.blocks = static_cast<int>(r.u32());
    model.blocks.overlap = r.f64();
    model.meta.bit_width = static_cast<int>(r.u32());
    model.meta.group_count = static_cast<long long>(r.u64());
    model.meta.per_view_length = static_cast<long long>(r.u64());
    model.meta.fused_length = static_cast<long long>(r.u64());
    model.has_classifier = r.u8() != 0;
    if (model.has_classifier) {
        ClassifierState &cl = model.classifier;
        cl.kind = r.u8() == 0 ? ClassifierKind::NnCosine : ClassifierKind::RidgeOvr;
        cl.class_count = static_cast<int>(r.u32());
        if (cl.kind == ClassifierKind::NnCosine) {
            const uint64_t rows = r.u64();
            const uint64_t dim = r.u64();
            cl.train_labels.resize(rows);
            r.bytes(cl.train_labels.data(), sizeof(int32_t) * rows);
            cl.train_features.resize(rows, dim);
            r.bytes(cl.train_features.data(), sizeof(float) * cl.train_features.size());
        } else {
            const uint64_t dim = r.u64();
            const uint32_t classes = r.u32();
            r.mat(cl.weights, static_cast<long>(dim), classes);
            r.vec(cl.bias, classes);
        }
    }
    return model;
}

} // namespace odmtc
