#include "duoboost/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace duoboost {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Replace each leaf's mean-residual value with a Newton step computed from
// the samples routed to it. correction is 1 for binary, (M-1)/M for softmax.
void newton_leaves(RegressionTree& tree, const Matrix& features, const Vec& residuals,
                   const Vec& probs, double correction) {
    std::map<int, std::pair<double, double>> leaf_sums;  // leaf id -> (sum r, sum p(1-p))
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const int leaf = tree.leaf_index(features.row(i));
        auto& s = leaf_sums[leaf];
        s.first += residuals[i];
        s.second += probs[i] * (1.0 - probs[i]);
    }
    for (auto& [leaf, s] : leaf_sums) {
        double value = 0.0;
        if (s.second > 1e-12) value = correction * s.first / s.second;
        tree.nodes()[leaf].value.assign(1, value);
    }
}

} // namespace

GbmModel::GbmModel(int num_classes, GbmParams params, Vec init_scores,
                   std::vector<std::vector<RegressionTree>> stages)
    : num_classes_(num_classes), params_(params), init_scores_(std::move(init_scores)),
      stages_(std::move(stages)) {}

GbmModel GbmModel::fit(const Matrix& features, const std::vector<int>& labels, int num_classes,
                       const GbmParams& params) {
    const std::size_t n = features.rows();
    if (n < 2) throw std::invalid_argument("GbmModel::fit: need at least 2 samples");
    if (n != labels.size()) throw std::invalid_argument("GbmModel::fit: feature/label count mismatch");
    if (num_classes < 2) throw std::invalid_argument("GbmModel::fit: need at least 2 classes");

    std::vector<std::size_t> counts(num_classes, 0);
    for (int y : labels) {
        if (y < 0 || y >= num_classes) throw std::invalid_argument("GbmModel::fit: label out of range");
        ++counts[y];
    }
    int distinct = 0;
    for (auto c : counts) distinct += c > 0;
    if (distinct < 2) throw std::invalid_argument("GbmModel::fit: degenerate labels (single class)");

    GbmModel model;
    model.num_classes_ = num_classes;
    model.params_ = params;

    const TreeParams tree_params{params.max_depth, params.min_samples_leaf};
    const bool binary = num_classes == 2;

    if (binary) {
        const double p1 = static_cast<double>(counts[1]) / static_cast<double>(n);
        model.init_scores_.assign(1, std::log(p1 / (1.0 - p1)));
        Vec score(n, model.init_scores_[0]);
        for (int stage = 0; stage < params.num_stages; ++stage) {
            Vec probs(n), residual(n);
            for (std::size_t i = 0; i < n; ++i) {
                probs[i] = sigmoid(score[i]);
                residual[i] = static_cast<double>(labels[i] == 1) - probs[i];
            }
            Matrix targets(n, 1);
            for (std::size_t i = 0; i < n; ++i) targets(i, 0) = residual[i];
            RegressionTree tree = RegressionTree::fit(features, targets, tree_params);
            newton_leaves(tree, features, residual, probs, 1.0);
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                score[i] += params.learning_rate * tree.predict_one(features.row(i))[0];
                const double p = sigmoid(score[i]);
                loss -= labels[i] == 1 ? std::log(std::max(p, 1e-300))
                                       : std::log(std::max(1.0 - p, 1e-300));
            }
            model.stages_.push_back({std::move(tree)});
            model.train_losses_.push_back(loss / static_cast<double>(n));
        }
    } else {
        model.init_scores_.resize(num_classes);
        for (int k = 0; k < num_classes; ++k) {
            // floor absent-class priors so init scores stay finite
            const double p = std::max(static_cast<double>(counts[k]) / static_cast<double>(n),
                                      1.0 / static_cast<double>(n + num_classes));
            model.init_scores_[k] = std::log(p);
        }
        Matrix score(n, num_classes);
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k < num_classes; ++k) score(i, k) = model.init_scores_[k];

        const double correction = static_cast<double>(num_classes - 1) / num_classes;
        Matrix probs(n, num_classes);
        auto update_probs = [&]() {
            for (std::size_t i = 0; i < n; ++i) {
                double mx = score(i, 0);
                for (int k = 1; k < num_classes; ++k) mx = std::max(mx, score(i, k));
                double z = 0.0;
                for (int k = 0; k < num_classes; ++k) z += std::exp(score(i, k) - mx);
                for (int k = 0; k < num_classes; ++k) probs(i, k) = std::exp(score(i, k) - mx) / z;
            }
        };
        for (int stage = 0; stage < params.num_stages; ++stage) {
            update_probs();
            std::vector<RegressionTree> stage_trees;
            for (int k = 0; k < num_classes; ++k) {
                Vec residual(n), p_k(n);
                Matrix targets(n, 1);
                for (std::size_t i = 0; i < n; ++i) {
                    p_k[i] = probs(i, k);
                    residual[i] = static_cast<double>(labels[i] == k) - p_k[i];
                    targets(i, 0) = residual[i];
                }
                RegressionTree tree = RegressionTree::fit(features, targets, tree_params);
                newton_leaves(tree, features, residual, p_k, correction);
                for (std::size_t i = 0; i < n; ++i)
                    score(i, k) += params.learning_rate * tree.predict_one(features.row(i))[0];
                stage_trees.push_back(std::move(tree));
            }
            update_probs();
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                loss -= std::log(std::max(probs(i, labels[i]), 1e-300));
            model.stages_.push_back(std::move(stage_trees));
            model.train_losses_.push_back(loss / static_cast<double>(n));
        }
    }
    return model;
}

Matrix GbmModel::predict_raw(const Matrix& features) const {
    if (num_classes_ == 0) throw std::logic_error("GbmModel: not fitted");
    const int score_dim = static_cast<int>(init_scores_.size());
    Matrix out(features.rows(), score_dim);
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto x = features.row(i);
        for (int c = 0; c < score_dim; ++c) out(i, c) = init_scores_[c];
        for (const auto& stage : stages_)
            for (int t = 0; t < static_cast<int>(stage.size()); ++t)
                out(i, t) += params_.learning_rate * stage[t].predict_one(x)[0];
    }
    return out;
}

std::vector<int> GbmModel::predict_class(const Matrix& features) const {
    const Matrix raw = predict_raw(features);
    std::vector<int> out(raw.rows());
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        if (init_scores_.size() == 1) {
            out[i] = raw(i, 0) > 0.0 ? 1 : 0;
        } else {
            int best = 0;
            for (int k = 1; k < num_classes_; ++k)
                if (raw(i, k) > raw(i, best)) best = k;
            out[i] = best;
        }
    }
    return out;
}

int GbmModel::bfv_dim() const {
    const int per_stage = num_classes_ == 2 ? 1 : num_classes_;
    return num_stages() * per_stage;
}

Vec GbmModel::extract_bfv(std::span<const double> x) const {
    if (stages_.empty() && num_classes_ == 0) throw std::logic_error("GbmModel: not fitted");
    Vec bfv;
    bfv.reserve(bfv_dim());
    // stage-major: stage 0 trees first, then stage 1, ...
    for (const auto& stage : stages_)
        for (const auto& tree : stage) bfv.push_back(tree.predict_one(x)[0]);
    return bfv;
}

Matrix GbmModel::extract_bfv_all(const Matrix& features) const {
    Matrix out(features.rows(), bfv_dim());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const Vec bfv = extract_bfv(features.row(i));
        for (std::size_t c = 0; c < bfv.size(); ++c) out(i, c) = bfv[c];
    }
    return out;
}

Vec GbmModel::feature_gains(int num_features) const {
    Vec gains(num_features, 0.0);
    for (const auto& stage : stages_)
        for (const auto& tree : stage)
            for (int f = 0; f < num_features; ++f) gains[f] += tree.feature_gain(f);
    return gains;
}

void write_bfv_csv(const GbmModel& model, const Matrix& features, std::ostream& out) {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    const int d = model.bfv_dim();
    for (int c = 0; c < d; ++c) out << (c ? "," : "") << "bfv_" << c;
    out << "\n";
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const Vec bfv = model.extract_bfv(features.row(i));
        for (int c = 0; c < d; ++c) out << (c ? "," : "") << bfv[c];
        out << "\n";
    }
}

} // namespace duoboost
