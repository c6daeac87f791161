#include "duoboost/fusion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "duoboost/rng.hpp"

namespace duoboost {

FusionKind fusion_kind_from_string(const std::string& name) {
    if (name == "concat") return FusionKind::concat;
    if (name == "product") return FusionKind::product;
    throw std::invalid_argument("unknown fusion kind: " + name);
}

std::string to_string(FusionKind k) { return k == FusionKind::concat ? "concat" : "product"; }

FusionVariant fusion_variant_from_string(const std::string& name) {
    if (name == "baseline") return FusionVariant::baseline;
    if (name == "bfv") return FusionVariant::bfv;
    throw std::invalid_argument("unknown fusion variant: " + name);
}

std::string to_string(FusionVariant v) { return v == FusionVariant::baseline ? "baseline" : "bfv"; }

Standardizer Standardizer::fit(const Matrix& data) {
    Standardizer s;
    const std::size_t n = data.rows(), d = data.cols();
    if (n == 0) throw std::invalid_argument("Standardizer::fit: empty input");
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) s.mean[c] += data(i, c);
    for (std::size_t c = 0; c < d; ++c) s.mean[c] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = data(i, c) - s.mean[c];
            s.stddev[c] += diff * diff;
        }
    for (std::size_t c = 0; c < d; ++c) {
        s.stddev[c] = std::sqrt(s.stddev[c] / static_cast<double>(n));
        if (s.stddev[c] < 1e-12) s.stddev[c] = 1.0;  // constant dimension
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& data) const {
    if (data.cols() != mean.size()) throw std::invalid_argument("Standardizer: dimension mismatch");
    Matrix out(data.rows(), data.cols());
    for (std::size_t i = 0; i < data.rows(); ++i)
        for (std::size_t c = 0; c < data.cols(); ++c)
            out(i, c) = (data(i, c) - mean[c]) / stddev[c];
    return out;
}

FusionModel::FusionModel(int num_classes, FusionKind fusion, FusionVariant variant,
                         std::vector<DenseLayer> branch_u, std::vector<DenseLayer> branch_2,
                         std::vector<DenseLayer> head, Standardizer bfv_standardizer)
    : num_classes_(num_classes), fusion_(fusion), variant_(variant),
      branch_u_(std::move(branch_u)), branch_2_(std::move(branch_2)), head_(std::move(head)),
      bfv_standardizer_(std::move(bfv_standardizer)) {}

namespace {

Matrix gather_rows(const Matrix& features, const std::vector<int>& batch) {
    Matrix out(batch.size(), features.cols());
    for (std::size_t b = 0; b < batch.size(); ++b)
        for (std::size_t c = 0; c < features.cols(); ++c) out(b, c) = features(batch[b], c);
    return out;
}

Matrix fuse(FusionKind kind, const Matrix& a, const Matrix& b) {
    if (kind == FusionKind::concat) {
        Matrix out(a.rows(), a.cols() + b.cols());
        for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t c = 0; c < a.cols(); ++c) out(i, c) = a(i, c);
            for (std::size_t c = 0; c < b.cols(); ++c) out(i, a.cols() + c) = b(i, c);
        }
        return out;
    }
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
    return out;
}

// dL/d(embedding) for each branch from dL/d(fused)
void unfuse(FusionKind kind, const Matrix& dfused, const Matrix& a, const Matrix& b,
            Matrix& da, Matrix& db) {
    if (kind == FusionKind::concat) {
        da = Matrix(a.rows(), a.cols());
        db = Matrix(b.rows(), b.cols());
        for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t c = 0; c < a.cols(); ++c) da(i, c) = dfused(i, c);
            for (std::size_t c = 0; c < b.cols(); ++c) db(i, c) = dfused(i, a.cols() + c);
        }
        return;
    }
    da = Matrix(a.rows(), a.cols());
    db = Matrix(b.rows(), b.cols());
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        da.data()[i] = dfused.data()[i] * b.data()[i];
        db.data()[i] = dfused.data()[i] * a.data()[i];
    }
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix p(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        double mx = logits(i, 0);
        for (std::size_t c = 1; c < logits.cols(); ++c) mx = std::max(mx, logits(i, c));
        double z = 0.0;
        for (std::size_t c = 0; c < logits.cols(); ++c) z += std::exp(logits(i, c) - mx);
        for (std::size_t c = 0; c < logits.cols(); ++c) p(i, c) = std::exp(logits(i, c) - mx) / z;
    }
    return p;
}

struct ForwardState {
    std::vector<Matrix> act_u;
    std::vector<Matrix> act_2;
    std::vector<Matrix> act_head;
};

ForwardState forward_all(const std::vector<DenseLayer>& branch_u,
                         const std::vector<DenseLayer>& branch_2,
                         const std::vector<DenseLayer>& head, FusionKind kind, Matrix in_u,
                         Matrix in_2) {
    ForwardState s;
    s.act_u = stack_forward(branch_u, std::move(in_u), false);
    s.act_2 = stack_forward(branch_2, std::move(in_2), false);
    s.act_head = stack_forward(head, fuse(kind, s.act_u.back(), s.act_2.back()), true);
    return s;
}

} // namespace

Matrix FusionModel::logits(const Matrix& input_u, const Matrix& input_2) const {
    auto s = forward_all(branch_u_, branch_2_, head_, fusion_, input_u, input_2);
    return std::move(s.act_head.back());
}

Matrix FusionModel::probabilities(const Matrix& input_u, const Matrix& input_2) const {
    return softmax_rows(logits(input_u, input_2));
}

double FusionModel::cross_entropy(const Matrix& input_u, const Matrix& input_2,
                                  const std::vector<int>& labels) const {
    const Matrix p = probabilities(input_u, input_2);
    double loss = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        loss -= std::log(std::max(p(i, labels[i]), 1e-300));
    return loss / static_cast<double>(labels.size());
}

FusionModel::Gradients FusionModel::gradients(const Matrix& input_u, const Matrix& input_2,
                                              const std::vector<int>& labels) const {
    auto state = forward_all(branch_u_, branch_2_, head_, fusion_, input_u, input_2);
    const Matrix p = softmax_rows(state.act_head.back());
    Matrix dlogits(p.rows(), p.cols());
    const double inv_n = 1.0 / static_cast<double>(labels.size());
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t c = 0; c < p.cols(); ++c)
            dlogits(i, c) = (p(i, c) - (static_cast<int>(c) == labels[i] ? 1.0 : 0.0)) * inv_n;

    Gradients g;
    Matrix dfused;
    g.head = stack_backward(head_, state.act_head, std::move(dlogits), true, &dfused);
    Matrix du, d2;
    unfuse(fusion_, dfused, state.act_u.back(), state.act_2.back(), du, d2);
    g.branch_u = stack_backward(branch_u_, state.act_u, std::move(du), false, nullptr);
    g.branch_2 = stack_backward(branch_2_, state.act_2, std::move(d2), false, nullptr);
    return g;
}

Matrix FusionModel::branch2_input(const Dataset& data, const GbmModel* gbm) const {
    if (variant_ == FusionVariant::baseline) return data.features_s();
    if (!gbm) throw std::logic_error("FusionModel: bfv variant requires a fitted GBM");
    Matrix bfv = gbm->extract_bfv_all(data.features_s());
    if (!bfv_standardizer_.empty()) return bfv_standardizer_.apply(bfv);
    return bfv;
}

std::vector<int> FusionModel::predict(const Dataset& data, const GbmModel* gbm) const {
    const Matrix out = logits(data.features_u(), branch2_input(data, gbm));
    return classify_rows(out, Codebook(num_classes_));
}

FusionModel FusionModel::train(const Dataset& train, const Dataset& valid, const GbmModel* gbm,
                               const FusionConfig& config) {
    train.validate();
    valid.validate();
    if (train.samples.empty()) throw std::invalid_argument("FusionModel::train: empty training set");
    if (train.num_classes != valid.num_classes || train.dim_u != valid.dim_u ||
        train.dim_s != valid.dim_s)
        throw std::invalid_argument("FusionModel::train: train/valid datasets disagree");
    if (config.branch_u_sizes.empty() || config.branch_s_sizes.empty())
        throw std::invalid_argument("FusionModel::train: branches need at least one layer");
    if (config.fusion == FusionKind::product &&
        config.branch_u_sizes.back() != config.branch_s_sizes.back())
        throw std::invalid_argument(
            "FusionModel::train: product fusion requires equal branch output dims");
    if (config.variant == FusionVariant::bfv && !gbm)
        throw std::logic_error("FusionModel::train: bfv variant requires a fitted GBM");

    FusionModel model;
    model.num_classes_ = train.num_classes;
    model.fusion_ = config.fusion;
    model.variant_ = config.variant;

    // assemble branch-2 inputs (and the standardizer) before any training
    Matrix in2_train, in2_valid;
    if (config.variant == FusionVariant::bfv) {
        Matrix bfv_train = gbm->extract_bfv_all(train.features_s());
        Matrix bfv_valid = gbm->extract_bfv_all(valid.features_s());
        if (config.standardize_bfv) {
            model.bfv_standardizer_ = Standardizer::fit(bfv_train);
            in2_train = model.bfv_standardizer_.apply(bfv_train);
            in2_valid = model.bfv_standardizer_.apply(bfv_valid);
        } else {
            in2_train = std::move(bfv_train);
            in2_valid = std::move(bfv_valid);
        }
    } else {
        in2_train = train.features_s();
        in2_valid = valid.features_s();
    }
    const Matrix inu_train = train.features_u();
    const Matrix inu_valid = valid.features_u();
    const std::vector<int> train_y = train.labels();
    const std::vector<int> valid_y = valid.labels();

    auto sizes = [](int input, const std::vector<int>& rest, int output = -1) {
        std::vector<int> s{input};
        s.insert(s.end(), rest.begin(), rest.end());
        if (output >= 0) s.push_back(output);
        return s;
    };
    model.branch_u_ = init_stack(sizes(static_cast<int>(inu_train.cols()), config.branch_u_sizes),
                                 mix_seed(config.seed, 0xB1));
    model.branch_2_ = init_stack(sizes(static_cast<int>(in2_train.cols()), config.branch_s_sizes),
                                 mix_seed(config.seed, 0xB2));
    const int fused_dim = config.fusion == FusionKind::concat
                              ? config.branch_u_sizes.back() + config.branch_s_sizes.back()
                              : config.branch_u_sizes.back();
    model.head_ = init_stack(sizes(fused_dim, config.head_hidden, train.num_classes),
                             mix_seed(config.seed, 0xB3));

    std::vector<DenseLayer> rms_u, rms_2, rms_head;
    const int n = static_cast<int>(train.size());
    const int batch_size = std::max(1, std::min(config.batch_size, n));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(mix_seed(config.seed, 0xB4));

    struct Snapshot {
        std::vector<DenseLayer> branch_u, branch_2, head;
        double metric = -1.0;
        int epoch = -1;
    } best;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        for (int start = 0; start < n; start += batch_size) {
            const int end = std::min(start + batch_size, n);
            const std::vector<int> batch(order.begin() + start, order.begin() + end);
            auto state = forward_all(model.branch_u_, model.branch_2_, model.head_, model.fusion_,
                                     gather_rows(inu_train, batch), gather_rows(in2_train, batch));
            const Matrix p = softmax_rows(state.act_head.back());
            Matrix dlogits(p.rows(), p.cols());
            const double inv_b = 1.0 / static_cast<double>(batch.size());
            for (std::size_t i = 0; i < p.rows(); ++i) {
                const int y = train_y[batch[i]];
                epoch_loss -= std::log(std::max(p(i, y), 1e-300));
                for (std::size_t c = 0; c < p.cols(); ++c)
                    dlogits(i, c) = (p(i, c) - (static_cast<int>(c) == y ? 1.0 : 0.0)) * inv_b;
            }
            Matrix dfused;
            auto g_head =
                stack_backward(model.head_, state.act_head, std::move(dlogits), true, &dfused);
            Matrix du, d2;
            unfuse(model.fusion_, dfused, state.act_u.back(), state.act_2.back(), du, d2);
            auto g_u = stack_backward(model.branch_u_, state.act_u, std::move(du), false, nullptr);
            auto g_2 = stack_backward(model.branch_2_, state.act_2, std::move(d2), false, nullptr);
            apply_gradient_update(model.head_, g_head, rms_head, config.optimizer,
                                  config.learning_rate, config.rms_decay, config.rms_stabilizer);
            apply_gradient_update(model.branch_u_, g_u, rms_u, config.optimizer,
                                  config.learning_rate, config.rms_decay, config.rms_stabilizer);
            apply_gradient_update(model.branch_2_, g_2, rms_2, config.optimizer,
                                  config.learning_rate, config.rms_decay, config.rms_stabilizer);
        }
        if (!std::isfinite(epoch_loss))
            throw std::runtime_error("FusionModel::train: training diverged at epoch " +
                                     std::to_string(epoch));

        FusionEpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = epoch_loss / static_cast<double>(n);
        if (!valid_y.empty()) {
            const Matrix vl = model.logits(inu_valid, in2_valid);
            const auto preds = classify_rows(vl, Codebook(model.num_classes_));
            rec.val_metric =
                metric_value(confusion_and_metrics(preds, valid_y, model.num_classes_), config.metric);
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        model.history_.push_back(rec);

        if (rec.val_metric > best.metric) {
            best = {model.branch_u_, model.branch_2_, model.head_, rec.val_metric, epoch};
        }
    }

    if (best.epoch >= 0) {
        model.branch_u_ = std::move(best.branch_u);
        model.branch_2_ = std::move(best.branch_2);
        model.head_ = std::move(best.head);
        model.best_epoch_ = best.epoch;
    }
    return model;
}

} // namespace duoboost
