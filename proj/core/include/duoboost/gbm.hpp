#pragma once

#include <iosfwd>
#include <vector>

#include "duoboost/tree.hpp"

namespace duoboost {

struct GbmParams {
    int num_stages = 50;
    double learning_rate = 0.1;
    int max_depth = 3;
    int min_samples_leaf = 1;
};

/// Gradient-boosting classifier on a single feature block. Binary targets
/// train under logistic loss with one tree per stage; multiclass targets
/// train under softmax loss with one tree per class per stage. Leaf values
/// are single Newton steps (with the (M-1)/M correction in the multiclass
/// case) and are stored raw, without the learning-rate factor.
class GbmModel {
public:
    GbmModel() = default;

    static GbmModel fit(const Matrix& features, const std::vector<int>& labels, int num_classes,
                        const GbmParams& params);

    /// Raw decision scores: init + learning_rate * sum of leaf values.
    /// One column for binary models (log-odds), M columns otherwise.
    Matrix predict_raw(const Matrix& features) const;
    std::vector<int> predict_class(const Matrix& features) const;

    /// Boosted-feature vector: raw leaf values reached by the sample, one
    /// entry per (stage) tree for binary models (length N) and one per
    /// (stage, class) tree otherwise (length N*M, stage-major).
    Vec extract_bfv(std::span<const double> x) const;
    Matrix extract_bfv_all(const Matrix& features) const;
    int bfv_dim() const;

    int num_classes() const { return num_classes_; }
    int num_stages() const { return static_cast<int>(stages_.size()); }
    double learning_rate() const { return params_.learning_rate; }
    const Vec& init_scores() const { return init_scores_; }
    const std::vector<std::vector<RegressionTree>>& stages() const { return stages_; }
    const Vec& train_losses() const { return train_losses_; }
    const GbmParams& params() const { return params_; }

    /// Summed split gain per feature across every tree (importance ranking).
    Vec feature_gains(int num_features) const;

    // Deserialization hook.
    GbmModel(int num_classes, GbmParams params, Vec init_scores,
             std::vector<std::vector<RegressionTree>> stages);

private:
    int num_classes_ = 0;
    GbmParams params_;
    Vec init_scores_;                                 // 1 entry (binary) or M
    std::vector<std::vector<RegressionTree>> stages_; // [stage][tree]
    Vec train_losses_;                                // mean loss after each stage
};

/// One row per sample, header bfv_0..bfv_{D-1}.
void write_bfv_csv(const GbmModel& model, const Matrix& features, std::ostream& out);

} // namespace duoboost
