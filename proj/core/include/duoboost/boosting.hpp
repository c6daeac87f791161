#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duoboost/mcloss.hpp"
#include "duoboost/metrics.hpp"
#include "duoboost/mlp.hpp"
#include "duoboost/rng.hpp"
#include "duoboost/stepsearch.hpp"
#include "duoboost/tree.hpp"

namespace duoboost {

enum class TwoLearnerMode { both, only_g, only_s };

TwoLearnerMode two_learner_mode_from_string(const std::string& name);
std::string to_string(TwoLearnerMode m);

/// One boosting stage: network learner g on the unstructured modality,
/// tree learner h on the structured modality, and their step sizes.
/// An absent learner carries step 0.
struct StagePair {
    std::optional<Mlp> g;
    std::optional<RegressionTree> h;
    double eps = 0.0;
    double delta = 0.0;

    bool operator==(const StagePair&) const = default;
};

struct IterationRecord {
    int iter = 0;
    double risk = 0.0;        // training risk after the update
    double eps = 0.0;
    double delta = 0.0;
    double seconds = 0.0;     // wall clock for the iteration
    double val_metric = 0.0;
    int inner_j = -1;         // chosen inner iteration (second-order only)
    Vec inner_risks;          // risk per inner candidate (second-order only)
};

struct TwoLearnerConfig {
    int num_iterations = 20;  // N
    TwoLearnerMode mode = TwoLearnerMode::both;
    MlpConfig mlp;
    TreeParams tree;
    StepConfig step;
    Metric metric = Metric::f1;
    bool warm_start = false;
    std::uint64_t seed = 0;
};

struct SecondOrderConfig {
    int outer_iterations = 20;  // N1
    int inner_iterations = 1;   // N2
    double eps0 = 0.1;
    double delta0 = 0.1;
    MlpConfig mlp;
    TreeParams tree;
    StepConfig step;
    Metric metric = Metric::f1;
    std::uint64_t seed = 0;
};

struct TwoLearnerModel {
    int num_classes = 2;
    TwoLearnerMode mode = TwoLearnerMode::both;
    std::vector<StagePair> stages;
    std::vector<IterationRecord> history;
    int best_iteration = -1;  // stage index with the best validation metric

    /// From-scratch score accumulation over the first num_stages stages
    /// (all stages when negative).
    Matrix decision_scores(const Matrix& features_u, const Matrix& features_s,
                           int num_stages = -1) const;
    std::vector<int> predict(const Matrix& features_u, const Matrix& features_s,
                             int num_stages = -1) const;
};

/// Reproducible per-stage seed streams (shared with reference trainers).
inline std::uint64_t stage_mlp_seed(std::uint64_t seed, int t, int j = 0) {
    return mix_seed(seed, 0xA1B2 + static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(j));
}
inline std::uint64_t stage_step_seed(std::uint64_t seed, int t, int j = 0) {
    return mix_seed(seed, 0xC3D4 + static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(j));
}

/// First-order two-weak-learner boosting. Per iteration: residuals at the
/// current scores, g fit to (x_u, w) and h fit to (x_s, w) by squared error,
/// then a step search minimizing the true training risk of f + eps*g +
/// delta*h. In only_g / only_s modes the absent family is skipped and its
/// step forced to zero.
TwoLearnerModel train_two_learner(const Dataset& train, const Dataset& valid,
                                  const TwoLearnerConfig& config);

enum class WeakFamily { g, h };

/// Second-order regression targets at the given steps:
/// family g: eps*w - eps^2/4 * w~ - eps*delta/2 * w (h symmetric in delta).
Matrix second_order_targets(const PseudoResiduals& residuals, double eps, double delta,
                            WeakFamily family);

/// Second-order two-weak-learner boosting with an inner loop that jointly
/// refines (g, h, eps, delta); the inner candidate with the lowest true risk
/// is applied.
TwoLearnerModel train_two_learner_second_order(const Dataset& train, const Dataset& valid,
                                               const SecondOrderConfig& config);

} // namespace duoboost
