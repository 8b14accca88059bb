#include "core/dataset.hpp"

#include "core/common.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace fs = std::filesystem;

namespace odmtc {

void MultiViewDataset::validate() const {
    require(view1.size() == view2.size() && view1.size() == labels.size(), ErrorCode::Data,
            "views and labels must have the same sample count");
    for (size_t k = 0; k < view1.size(); ++k)
        require(view1[k].rows == rows() && view1[k].cols == cols() &&
                    view2[k].rows == rows() && view2[k].cols == cols(),
                ErrorCode::Data, "all view images must share one size");
    for (int l : labels)
        require(l >= 0 && l < class_count, ErrorCode::Data, "label out of range");
}

LoadedStack load_dataset(const std::string &root, const LoadOptions &opts) {
    require(fs::is_directory(root), ErrorCode::Io, "dataset root is not a directory: " + root);

    std::vector<std::string> class_dirs;
    for (const auto &e : fs::directory_iterator(root))
        if (e.is_directory())
            class_dirs.push_back(e.path().filename().string());
    std::sort(class_dirs.begin(), class_dirs.end());
    require(class_dirs.size() >= 2, ErrorCode::Data,
            "dataset needs at least 2 class subdirectories, found " +
                std::to_string(class_dirs.size()));

    LoadedStack out;
    out.class_names = class_dirs;
    std::vector<std::string> files;
    for (size_t ci = 0; ci < class_dirs.size(); ++ci) {
        std::vector<std::string> names;
        for (const auto &e : fs::directory_iterator(fs::path(root) / class_dirs[ci]))
            if (e.is_regular_file())
                names.push_back(e.path().string());
        std::sort(names.begin(), names.end());
        for (auto &n : names) {
            files.push_back(n);
            out.labels.push_back(static_cast<int>(ci));
        }
    }
    require(!files.empty(), ErrorCode::Data, "no image files under " + root);

    int rows = -1, cols = -1;
    const bool resize = opts.resize_rows > 0 && opts.resize_cols > 0;
    for (const auto &f : files) {
        int r, c;
        if (opts.color) {
            RgbImage img = load_image_rgb(f);
            if (resize)
                img = resize_bilinear(img, opts.resize_rows, opts.resize_cols);
            r = img.rows;
            c = img.cols;
            out.rgb.push_back(std::move(img));
        } else {
            Image img = load_image_gray(f);
            if (resize)
                img = resize_bilinear(img, opts.resize_rows, opts.resize_cols);
            r = img.rows;
            c = img.cols;
            out.images.push_back(std::move(img));
        }
        if (rows < 0) {
            rows = r;
            cols = c;
        } else {
            require(r == rows && c == cols, ErrorCode::Data,
                    "image size " + std::to_string(r) + "x" + std::to_string(c) + " differs from " +
                        std::to_string(rows) + "x" + std::to_string(cols) +
                        " and no resize is configured: " + f);
        }
    }
    return out;
}

Image lbp_image(const Image &img) {
    static const int dr[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
    static const int dc[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
    Image out(img.rows, img.cols);
    for (int r = 0; r < img.rows; ++r) {
        for (int c = 0; c < img.cols; ++c) {
            const double center = img.at(r, c);
            int code = 0;
            for (int b = 0; b < 8; ++b) {
                const int nr = r + dr[b];
                const int nc = c + dc[b];
                const double v = (nr >= 0 && nr < img.rows && nc >= 0 && nc < img.cols)
                                     ? img.at(nr, nc)
                                     : 0.0;
                if (v > center)
                    code |= 1 << b;
            }
            out.at(r, c) = code / 255.0;
        }
    }
    return out;
}

ImageStack lbp_view(const ImageStack &images, int threads) {
    ImageStack out(images.size());
    parallel_for(static_cast<int64_t>(images.size()), threads,
                 [&](int64_t i) { out[i] = lbp_image(images[i]); });
    return out;
}

Image wavelet_image(const Image &img, int levels) {
    require(levels >= 1, ErrorCode::Argument, "wavelet levels must be >= 1");
    const int div = 1 << levels;
    require(img.rows % div == 0 && img.cols % div == 0, ErrorCode::Data,
            "image size " + std::to_string(img.rows) + "x" + std::to_string(img.cols) +
                " not divisible by 2^" + std::to_string(levels));
    Image approx = img;
    for (int lv = 0; lv < levels; ++lv) {
        Image next(approx.rows / 2, approx.cols / 2);
        for (int r = 0; r < next.rows; ++r)
            for (int c = 0; c < next.cols; ++c)
                next.at(r, c) = 0.25 * (approx.at(2 * r, 2 * c) + approx.at(2 * r, 2 * c + 1) +
                                        approx.at(2 * r + 1, 2 * c) + approx.at(2 * r + 1, 2 * c + 1));
        approx = std::move(next);
    }
    // nearest-neighbor upsample back to the source size so views stay paired
    Image out(img.rows, img.cols);
    for (int r = 0; r < img.rows; ++r)
        for (int c = 0; c < img.cols; ++c)
            out.at(r, c) = approx.at(r / div, c / div);
    return out;
}

ImageStack wavelet_view(const ImageStack &images, int levels, int threads) {
    ImageStack out(images.size());
    parallel_for(static_cast<int64_t>(images.size()), threads,
                 [&](int64_t i) { out[i] = wavelet_image(images[i], levels); });
    return out;
}

std::pair<ImageStack, ImageStack> channel_views(const std::vector<RgbImage> &images,
                                                int first, int second) {
    require(first >= 0 && first < 3 && second >= 0 && second < 3, ErrorCode::Argument,
            "channel index must be 0, 1 or 2");
    ImageStack a(images.size()), b(images.size());
    for (size_t k = 0; k < images.size(); ++k) {
        const RgbImage &img = images[k];
        Image ia(img.rows, img.cols), ib(img.rows, img.cols);
        const size_t n = ia.size();
        for (size_t i = 0; i < n; ++i) {
            ia.pix[i] = img.pix[3 * i + first];
            ib.pix[i] = img.pix[3 * i + second];
        }
        a[k] = std::move(ia);
        b[k] = std::move(ib);
    }
    return {std::move(a), std::move(b)};
}

ImageStack ingest_feature_maps(const std::string &csv_path, int map_rows, int map_cols) {
    require(map_rows > 0 && map_cols > 0, ErrorCode::Argument, "map shape must be positive");
    std::ifstream in(csv_path);
    require(in.good(), ErrorCode::Io, "cannot open feature file: " + csv_path);
    const size_t want = static_cast<size_t>(map_rows) * map_cols;
    ImageStack out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        Image img(map_rows, map_cols);
        size_t n = 0;
        const char *p = line.c_str();
        const char *end = p + line.size();
        while (p < end) {
            char *next = nullptr;
            const double v = std::strtod(p, &next);
            require(next != p, ErrorCode::Io,
                    csv_path + ": line " + std::to_string(lineno) + ": malformed number");
            require(n < want, ErrorCode::Data,
                    csv_path + ": line " + std::to_string(lineno) + ": row has more than " +
                        std::to_string(want) + " values");
            img.pix[n++] = v;
            p = next;
            while (p < end && (*p == ',' || *p == ' ' || *p == '\t' || *p == '\r'))
                ++p;
        }
        require(n == want, ErrorCode::Data,
                csv_path + ": line " + std::to_string(lineno) + ": expected " +
                    std::to_string(want) + " values, got " + std::to_string(n));
        out.push_back(std::move(img));
    }
    require(!out.empty(), ErrorCode::Data, "no rows in feature file: " + csv_path);
    return out;
}

std::vector<Split> make_splits(const std::vector<int> &labels, const SplitSpec &spec) {
    const int m = static_cast<int>(labels.size());
    require(m > 0, ErrorCode::Data, "empty label set");
    require(spec.train_count > 0 && spec.train_count < m, ErrorCode::Config,
            "train_count must be in (0, " + std::to_string(m) + "), got " +
                std::to_string(spec.train_count));
    require(spec.repetitions >= 1, ErrorCode::Config, "repetitions must be >= 1");

    const int c = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::vector<int>> by_class(c);
    for (int i = 0; i < m; ++i)
        by_class[labels[i]].push_back(i);

    SplitRng rng(spec.rng_seed);
    std::vector<Split> splits;
    splits.reserve(spec.repetitions);
    for (int rep = 0; rep < spec.repetitions; ++rep) {
        Split s;
        if (spec.stratified) {
            // largest-remainder allocation of train_count across classes
            std::vector<int> take(c, 0);
            std::vector<std::pair<double, int>> rem(c);
            int assigned = 0;
            for (int l = 0; l < c; ++l) {
                const double share =
                    static_cast<double>(spec.train_count) * by_class[l].size() / m;
                take[l] = static_cast<int>(std::floor(share));
                take[l] = std::min<int>(take[l], static_cast<int>(by_class[l].size()));
                rem[l] = {share - take[l], l};
                assigned += take[l];
            }
            std::stable_sort(rem.begin(), rem.end(), [](const auto &a, const auto &b) {
                return a.first > b.first;
            });
            for (int i = 0; assigned < spec.train_count && i < c; ++i) {
                const int l = rem[i].second;
                if (take[l] < static_cast<int>(by_class[l].size())) {
                    ++take[l];
                    ++assigned;
                }
            }
            require(assigned == spec.train_count, ErrorCode::Data,
                    "stratified allocation failed; class sizes too small");
            for (int l = 0; l < c; ++l) {
                std::vector<int> idx = by_class[l];
                rng.shuffle(idx);
                for (size_t i = 0; i < idx.size(); ++i)
                    (static_cast<int>(i) < take[l] ? s.train : s.test).push_back(idx[i]);
            }
        } else {
            std::vector<int> idx(m);
            std::iota(idx.begin(), idx.end(), 0);
            rng.shuffle(idx);
            s.train.assign(idx.begin(), idx.begin() + spec.train_count);
            s.test.assign(idx.begin() + spec.train_count, idx.end());
        }
        std::sort(s.train.begin(), s.train.end());
        std::sort(s.test.begin(), s.test.end());
        splits.push_back(std::move(s));
    }
    return splits;
}

void export_splits_csv(const std::string &path, const std::vector<Split> &splits) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::Io, "cannot write " + path);
    out << "repetition,index,role\n";
    for (size_t rep = 0; rep < splits.size(); ++rep) {
        for (int i : splits[rep].train)
            out << rep << "," << i << ",train\n";
        for (int i : splits[rep].test)
            out << rep << "," << i << ",test\n";
    }
    require(out.good(), ErrorCode::Io, "write failed: " + path);
}

} // namespace odmtc
