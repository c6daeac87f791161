#include "duoboost/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "duoboost/rng.hpp"

namespace duoboost {

GenKind gen_kind_from_string(const std::string& name) {
    if (name == "split_tabular") return GenKind::split_tabular;
    if (name == "linear_margin") return GenKind::linear_margin;
    if (name == "shapes") return GenKind::shapes;
    if (name == "xor_bimodal") return GenKind::xor_bimodal;
    throw std::invalid_argument("unknown dataset kind: " + name);
}

std::string to_string(GenKind k) {
    switch (k) {
        case GenKind::split_tabular: return "split_tabular";
        case GenKind::linear_margin: return "linear_margin";
        case GenKind::shapes: return "shapes";
        default: return "xor_bimodal";
    }
}

int apply_label_noise(std::vector<BimodalSample>& samples, double rate, int num_classes,
                      std::uint64_t seed) {
    if (rate < 0.0 || rate >= 1.0)
        throw std::invalid_argument("apply_label_noise: rate must lie in [0, 1)");
    if (rate == 0.0) return 0;
    Rng rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, num_classes - 2);
    int flips = 0;
    for (auto& s : samples) {
        if (coin(rng) < rate) {
            int other = pick(rng);
            if (other >= s.label) ++other;  // uniform over the remaining classes
            s.label = other;
            ++flips;
        }
    }
    return flips;
}

namespace {

constexpr std::uint64_t kSaltSeparator = 0x11;
constexpr std::uint64_t kSaltSample = 0x12;
constexpr std::uint64_t kSaltNoise = 0x13;
constexpr std::uint64_t kSaltClassMeans = 0x21;

Vec standard_normal(Rng& rng, int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(dim);
    for (auto& x : v) x = gauss(rng);
    return v;
}

void finish(Dataset& ds, const GenSpec& spec, std::uint64_t seed) {
    ds.seed = seed;
    const int flips = apply_label_noise(ds.samples, spec.noise_rate, ds.num_classes,
                                        mix_seed(seed, kSaltNoise));
    ds.metadata["noise_flips"] = std::to_string(flips);
    ds.metadata["noise_rate"] = std::to_string(spec.noise_rate);
    ds.validate();
}

} // namespace

Dataset gen_linear_margin(const GenSpec& spec, int n, std::uint64_t seed) {
    if (spec.num_classes != 2)
        throw std::invalid_argument("gen_linear_margin: binary labels only");
    if (spec.dim_s < 1 || spec.dim_u < 1)
        throw std::invalid_argument("gen_linear_margin: dims must be positive");

    Dataset ds;
    ds.num_classes = 2;
    ds.dim_u = spec.dim_u;
    ds.dim_s = spec.dim_s;

    // fixed unit separator for the whole dataset
    Rng wrng(mix_seed(seed, kSaltSeparator));
    Vec separator = standard_normal(wrng, spec.dim_s);
    double norm = std::sqrt(dot(separator, separator));
    if (norm == 0.0) norm = 1.0;
    for (auto& x : separator) x /= norm;

    ds.samples.reserve(n);
    for (int i = 0; i < n; ++i) {
        Rng rng(mix_seed(seed, kSaltSample, static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        BimodalSample s;
        s.label = coin(rng) < spec.class0_prior ? 0 : 1;
        s.x_s = standard_normal(rng, spec.dim_s);
        // class 0 sits on the positive side of the separator
        const double side = dot(separator, s.x_s);
        if ((s.label == 0) != (side > 0.0))
            for (auto& x : s.x_s) x = -x;
        std::normal_distribution<double> blob(s.label == 0 ? spec.blob_mean : -spec.blob_mean, 1.0);
        s.x_u.resize(spec.dim_u);
        for (auto& x : s.x_u) x = blob(rng);
        ds.samples.push_back(std::move(s));
    }
    finish(ds, spec, seed);
    return ds;
}

namespace {

struct ShapeBox {
    int x0, y0, w, h;
};

void fill_rectangle(Matrix& img, const ShapeBox& b) {
    for (int r = b.y0; r < b.y0 + b.h; ++r)
        for (int c = b.x0; c < b.x0 + b.w; ++c) img(r, c) = 0.0;
}

// Isoceles triangle: apex at the top-center of the box, base on its bottom edge.
void fill_triangle(Matrix& img, const ShapeBox& b) {
    const double cx = b.x0 + (b.w - 1) / 2.0;
    for (int r = 0; r < b.h; ++r) {
        const double t = b.h == 1 ? 1.0 : static_cast<double>(r) / (b.h - 1);
        const double half = t * (b.w - 1) / 2.0;
        const int lo = static_cast<int>(std::ceil(cx - half));
        const int hi = static_cast<int>(std::floor(cx + half));
        for (int c = lo; c <= hi; ++c) img(b.y0 + r, c) = 0.0;
    }
}

} // namespace

Dataset gen_shapes(const GenSpec& spec, int n, std::uint64_t seed) {
    if (spec.num_classes != 3) throw std::invalid_argument("gen_shapes: three classes required");
    if (spec.image_side < 8) throw std::invalid_argument("gen_shapes: image side must be >= 8");
    if (spec.dim_s < 1) throw std::invalid_argument("gen_shapes: dim_s must be positive");

    const int side = spec.image_side;
    const double scale = static_cast<double>(side) / 128.0;
    // per-class minimum bounding boxes, scaled down from the 128-px layout
    const int min_box[3] = {std::max(2, static_cast<int>(std::lround(10 * scale))),
                            std::max(2, static_cast<int>(std::lround(20 * scale))),
                            std::max(2, static_cast<int>(std::lround(15 * scale)))};
    const int max_box = side - 2;  // 1-px white margin keeps background nonempty

    Dataset ds;
    ds.num_classes = 3;
    ds.dim_u = side * side;
    ds.dim_s = spec.dim_s;

    Rng mrng(mix_seed(seed, kSaltClassMeans));
    std::vector<Vec> class_means;
    for (int k = 0; k < 3; ++k) {
        Vec mean = standard_normal(mrng, spec.dim_s);
        for (auto& x : mean) x *= 1.5;
        class_means.push_back(std::move(mean));
    }

    std::set<std::string> types_used[3];
    ds.samples.reserve(n);
    for (int i = 0; i < n; ++i) {
        Rng rng(mix_seed(seed, kSaltSample, static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<int> pick_class(0, 2);
        BimodalSample s;
        s.label = pick_class(rng);

        Matrix img(side, side, 1.0);  // white background
        std::uniform_int_distribution<int> count_dist(1, 10);
        std::uniform_int_distribution<int> size_dist(min_box[s.label],
                                                     std::max(min_box[s.label], max_box));
        std::uniform_int_distribution<int> type_coin(0, 1);
        const int count = count_dist(rng);
        for (int q = 0; q < count; ++q) {
            ShapeBox box;
            box.w = size_dist(rng);
            box.h = size_dist(rng);
            std::uniform_int_distribution<int> xpos(1, side - 1 - box.w);
            std::uniform_int_distribution<int> ypos(1, side - 1 - box.h);
            box.x0 = xpos(rng);
            box.y0 = ypos(rng);
            const bool triangle = s.label == 1 || (s.label == 0 && type_coin(rng) == 0);
            if (triangle) {
                fill_triangle(img, box);
                types_used[s.label].insert("triangle");
            } else {
                fill_rectangle(img, box);
                types_used[s.label].insert("rectangle");
            }
        }
        s.x_u = img.data();

        std::normal_distribution<double> gauss(0.0, 1.0);
        s.x_s.resize(spec.dim_s);
        for (int c = 0; c < spec.dim_s; ++c) s.x_s[c] = class_means[s.label][c] + gauss(rng);
        ds.samples.push_back(std::move(s));
    }

    for (int k = 0; k < 3; ++k) {
        std::string joined;
        for (const auto& t : types_used[k]) joined += (joined.empty() ? "" : ",") + t;
        ds.metadata["shape_types_class_" + std::to_string(k)] = joined;
    }
    finish(ds, spec, seed);
    return ds;
}

Dataset gen_xor_bimodal(const GenSpec& spec, int n, std::uint64_t seed) {
    if (spec.num_classes != 2) throw std::invalid_argument("gen_xor_bimodal: binary labels only");
    if (spec.dim_u < 2 || spec.dim_s < 2)
        throw std::invalid_argument("gen_xor_bimodal: dims must be >= 2");

    Dataset ds;
    ds.num_classes = 2;
    ds.dim_u = spec.dim_u;
    ds.dim_s = spec.dim_s;
    ds.samples.reserve(n);

    for (int i = 0; i < n; ++i) {
        Rng rng(mix_seed(seed, kSaltSample, static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<int> bit(0, 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const int b_s = bit(rng);
        const int b_u = bit(rng);
        BimodalSample s;
        s.label = b_s ^ b_u;
        const double sign = s.label == 1 ? 1.0 : -1.0;

        auto modality = [&](int dim, int b) {
            Vec x(dim);
            // coord 0 encodes the latent bit, coord 1 leaks the label weakly
            x[0] = (b == 1 ? 1.0 : -1.0) + spec.bit_noise * gauss(rng);
            x[1] = spec.leakage * sign + gauss(rng);
            for (int c = 2; c < dim; ++c) x[c] = gauss(rng);
            return x;
        };
        s.x_s = modality(spec.dim_s, b_s);
        s.x_u = modality(spec.dim_u, b_u);
        ds.samples.push_back(std::move(s));
    }
    finish(ds, spec, seed);
    return ds;
}

Dataset split_tabular(const Matrix& features, const std::vector<int>& labels,
                      bool importance_split, std::uint64_t split_seed,
                      const GbmParams& gbm_params) {
    const int d = static_cast<int>(features.cols());
    if (d < 2) throw std::invalid_argument("split_tabular: need at least 2 columns");
    if (features.rows() != labels.size())
        throw std::invalid_argument("split_tabular: feature/label count mismatch");

    int num_classes = 0;
    for (int y : labels) num_classes = std::max(num_classes, y + 1);
    num_classes = std::max(num_classes, 2);

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    if (importance_split) {
        const GbmModel ranker = GbmModel::fit(features, labels, num_classes, gbm_params);
        const Vec gains = ranker.feature_gains(d);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return gains[a] > gains[b]; });
    } else {
        Rng rng(mix_seed(split_seed, 0x31));
        std::shuffle(order.begin(), order.end(), rng);
    }

    const int take_s = (d + 1) / 2;
    std::vector<int> cols_s(order.begin(), order.begin() + take_s);
    std::vector<int> cols_u(order.begin() + take_s, order.end());
    std::sort(cols_s.begin(), cols_s.end());
    std::sort(cols_u.begin(), cols_u.end());

    Dataset ds;
    ds.num_classes = num_classes;
    ds.dim_s = static_cast<int>(cols_s.size());
    ds.dim_u = static_cast<int>(cols_u.size());
    ds.seed = split_seed;
    ds.samples.reserve(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        BimodalSample s;
        s.label = labels[i];
        for (int c : cols_s) s.x_s.push_back(features(i, c));
        for (int c : cols_u) s.x_u.push_back(features(i, c));
        ds.samples.push_back(std::move(s));
    }

    auto join = [](const std::vector<int>& v) {
        std::string out;
        for (int c : v) out += (out.empty() ? "" : ",") + std::to_string(c);
        return out;
    };
    ds.metadata["columns_s"] = join(cols_s);
    ds.metadata["columns_u"] = join(cols_u);
    ds.metadata["split_mode"] = importance_split ? "importance" : "random";
    ds.validate();
    return ds;
}

namespace {

// Synthetic stand-in for an external tabular source: a few informative
// columns drive a noisy linear decision, the rest are nuisance.
void synthetic_tabular(const GenSpec& spec, int n, std::uint64_t seed, Matrix& features,
                       std::vector<int>& labels) {
    const int d = spec.total_columns;
    if (d < 2) throw std::invalid_argument("split_tabular: need at least 2 columns");
    const int k = std::clamp(spec.informative_columns, 1, d);

    Rng brng(mix_seed(seed, 0x41));
    std::vector<int> cols(d);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(cols.begin(), cols.end(), brng);
    std::uniform_real_distribution<double> mag(1.0, 2.0);
    std::uniform_int_distribution<int> sign(0, 1);
    Vec beta(d, 0.0);
    for (int j = 0; j < k; ++j) beta[cols[j]] = (sign(brng) ? 1.0 : -1.0) * mag(brng);

    features = Matrix(n, d);
    labels.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        Rng rng(mix_seed(seed, 0x42, static_cast<std::uint64_t>(i)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        double logit = 0.0;
        for (int c = 0; c < d; ++c) {
            features(i, c) = gauss(rng);
            logit += beta[c] * features(i, c);
        }
        labels[i] = logit + 0.5 * gauss(rng) > 0.0 ? 1 : 0;
    }
}

GeneratedPair generate_split_tabular(const GenSpec& spec) {
    Matrix features;
    std::vector<int> labels;
    if (!spec.csv_path.empty()) {
        load_csv(spec.csv_path, features, labels);
    } else {
        synthetic_tabular(spec, spec.n_train + spec.n_valid, spec.seed, features, labels);
    }
    const int total = static_cast<int>(features.rows());
    if (total < spec.n_train + spec.n_valid)
        throw std::invalid_argument("split_tabular: source has fewer rows than n_train + n_valid");

    std::vector<int> rows(total);
    std::iota(rows.begin(), rows.end(), 0);
    Rng rng(mix_seed(spec.seed, 0x43));
    std::shuffle(rows.begin(), rows.end(), rng);

    auto take = [&](int from, int count) {
        Matrix f(count, features.cols());
        std::vector<int> y(count);
        for (int i = 0; i < count; ++i) {
            y[i] = labels[rows[from + i]];
            for (std::size_t c = 0; c < features.cols(); ++c) f(i, c) = features(rows[from + i], c);
        }
        return std::pair{f, y};
    };
    auto [f_train, y_train] = take(0, spec.n_train);
    auto [f_valid, y_valid] = take(spec.n_train, spec.n_valid);

    // column assignment comes from the training rows only, then applies to both
    GeneratedPair pair;
    pair.train = split_tabular(f_train, y_train, spec.importance_split, spec.seed, spec.split_gbm);

    const std::string cols_s = pair.train.metadata.at("columns_s");
    const std::string cols_u = pair.train.metadata.at("columns_u");
    auto parse_cols = [](const std::string& text) {
        std::vector<int> cols;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) cols.push_back(std::stoi(tok));
        return cols;
    };
    const std::vector<int> s_cols = parse_cols(cols_s);
    const std::vector<int> u_cols = parse_cols(cols_u);

    pair.valid.num_classes = pair.train.num_classes;
    pair.valid.dim_s = static_cast<int>(s_cols.size());
    pair.valid.dim_u = static_cast<int>(u_cols.size());
    pair.valid.seed = spec.seed;
    pair.valid.metadata = pair.train.metadata;
    for (int i = 0; i < spec.n_valid; ++i) {
        BimodalSample s;
        s.label = y_valid[i];
        for (int c : s_cols) s.x_s.push_back(f_valid(i, c));
        for (int c : u_cols) s.x_u.push_back(f_valid(i, c));
        pair.valid.samples.push_back(std::move(s));
    }

    if (spec.noise_rate > 0.0) {
        const int flips_t = apply_label_noise(pair.train.samples, spec.noise_rate,
                                              pair.train.num_classes, mix_seed(spec.seed, 0x44));
        const int flips_v = apply_label_noise(pair.valid.samples, spec.noise_rate,
                                              pair.valid.num_classes, mix_seed(spec.seed, 0x45));
        pair.train.metadata["noise_flips"] = std::to_string(flips_t);
        pair.valid.metadata["noise_flips"] = std::to_string(flips_v);
    }
    pair.train.validate();
    pair.valid.validate();
    return pair;
}

} // namespace

GeneratedPair generate(const GenSpec& spec) {
    if (spec.n_train < 1 || spec.n_valid < 0)
        throw std::invalid_argument("generate: n_train must be >= 1 and n_valid >= 0");
    if (spec.kind == GenKind::split_tabular) return generate_split_tabular(spec);

    auto gen = [&](int n, std::uint64_t seed) {
        switch (spec.kind) {
            case GenKind::linear_margin: return gen_linear_margin(spec, n, seed);
            case GenKind::shapes: return gen_shapes(spec, n, seed);
            default: return gen_xor_bimodal(spec, n, seed);
        }
    };
    GeneratedPair pair;
    pair.train = gen(spec.n_train, mix_seed(spec.seed, 0x01));
    pair.valid = gen(spec.n_valid, mix_seed(spec.seed, 0x02));
    return pair;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

double parse_double(std::string_view token, int line, int column) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw std::runtime_error("dataset parse error at line " + std::to_string(line) +
                                 ", token " + std::to_string(column) + ": '" +
                                 std::string(token) + "' is not a number");
    return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
    dataset.validate();
    std::string out;
    out += std::to_string(dataset.num_classes) + " " + std::to_string(dataset.dim_u) + " " +
           std::to_string(dataset.dim_s) + " " + std::to_string(dataset.samples.size()) + "\n";
    for (const auto& s : dataset.samples) {
        out += std::to_string(s.label);
        for (double v : s.x_u) {
            out += ' ';
            append_double(out, v);
        }
        for (double v : s.x_s) {
            out += ' ';
            append_double(out, v);
        }
        out += '\n';
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("save_dataset: cannot open " + path);
    file << out;
    if (!file) throw std::runtime_error("save_dataset: write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("load_dataset: cannot open " + path);
    std::string line;
    if (!std::getline(file, line))
        throw std::runtime_error("dataset parse error at line 1: missing header");
    const auto header = split_ws(line);
    if (header.size() != 4)
        throw std::runtime_error("dataset parse error at line 1: header must be 'M dim_u dim_s n'");

    Dataset ds;
    ds.num_classes = static_cast<int>(parse_double(header[0], 1, 0));
    ds.dim_u = static_cast<int>(parse_double(header[1], 1, 1));
    ds.dim_s = static_cast<int>(parse_double(header[2], 1, 2));
    const int n = static_cast<int>(parse_double(header[3], 1, 3));
    if (ds.num_classes < 2 || ds.dim_u < 0 || ds.dim_s < 0 || n < 0)
        throw std::runtime_error("dataset parse error at line 1: invalid header values");

    ds.samples.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (!std::getline(file, line))
            throw std::runtime_error("dataset parse error: file truncated at row " +
                                     std::to_string(i) + " (line " + std::to_string(i + 2) + ")");
        const auto tokens = split_ws(line);
        const std::size_t expected = 1 + ds.dim_u + ds.dim_s;
        if (tokens.size() != expected)
            throw std::runtime_error("dataset parse error at row " + std::to_string(i) + " (line " +
                                     std::to_string(i + 2) + "): expected " +
                                     std::to_string(expected) + " tokens, found " +
                                     std::to_string(tokens.size()));
        BimodalSample s;
        s.label = static_cast<int>(parse_double(tokens[0], i + 2, 0));
        s.x_u.reserve(ds.dim_u);
        s.x_s.reserve(ds.dim_s);
        for (int c = 0; c < ds.dim_u; ++c) s.x_u.push_back(parse_double(tokens[1 + c], i + 2, 1 + c));
        for (int c = 0; c < ds.dim_s; ++c)
            s.x_s.push_back(parse_double(tokens[1 + ds.dim_u + c], i + 2, 1 + ds.dim_u + c));
        ds.samples.push_back(std::move(s));
    }
    while (std::getline(file, line))
        if (!split_ws(line).empty())
            throw std::runtime_error("dataset parse error: trailing data after " +
                                     std::to_string(n) + " rows");
    ds.validate();
    return ds;
}

void load_csv(const std::string& path, Matrix& features, std::vector<int>& labels) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("load_csv: cannot open " + path);
    std::string line;
    if (!std::getline(file, line)) throw std::runtime_error("load_csv: empty file " + path);

    auto split_comma = [](const std::string& text) {
        std::vector<std::string> out;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(tok);
        return out;
    };
    const auto header = split_comma(line);
    int label_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == "label") label_col = static_cast<int>(c);
    if (label_col < 0) throw std::runtime_error("load_csv: no 'label' column in " + path);
    const int d = static_cast<int>(header.size()) - 1;
    if (d < 1) throw std::runtime_error("load_csv: no feature columns in " + path);

    std::vector<Vec> rows;
    labels.clear();
    int lineno = 1;
    while (std::getline(file, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tokens = split_comma(line);
        if (tokens.size() != header.size())
            throw std::runtime_error("load_csv: wrong column count at line " +
                                     std::to_string(lineno));
        Vec row;
        for (std::size_t c = 0; c < tokens.size(); ++c) {
            const double v = parse_double(tokens[c], lineno, static_cast<int>(c));
            if (static_cast<int>(c) == label_col)
                labels.push_back(static_cast<int>(v));
            else
                row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    features = Matrix::from_rows(rows);
}

} // namespace duoboost
