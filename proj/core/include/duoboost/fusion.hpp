#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "duoboost/gbm.hpp"
#include "duoboost/metrics.hpp"
#include "duoboost/mlp.hpp"
#include "duoboost/types.hpp"

namespace duoboost {

enum class FusionKind { concat, product };
enum class FusionVariant { baseline, bfv };

FusionKind fusion_kind_from_string(const std::string& name);
std::string to_string(FusionKind k);
FusionVariant fusion_variant_from_string(const std::string& name);
std::string to_string(FusionVariant v);

/// Per-dimension affine standardization fit on the training split.
struct Standardizer {
    Vec mean;
    Vec stddev;   // constant dimensions get stddev 1

    static Standardizer fit(const Matrix& data);
    Matrix apply(const Matrix& data) const;
    bool empty() const { return mean.empty(); }

    bool operator==(const Standardizer&) const = default;
};

struct FusionEpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_metric = 0.0;
    double seconds = 0.0;
};

struct FusionConfig {
    std::vector<int> branch_u_sizes{16};
    std::vector<int> branch_s_sizes{16};
    std::vector<int> head_hidden{};      // final M-output layer appended internally
    FusionKind fusion = FusionKind::concat;
    FusionVariant variant = FusionVariant::baseline;
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 0.01;
    OptimizerKind optimizer = OptimizerKind::rmsprop;
    double rms_decay = 0.9;
    double rms_stabilizer = 1e-8;
    bool standardize_bfv = true;
    Metric metric = Metric::f1;
    std::uint64_t seed = 0;
};

/// Two-branch joint network: branch 1 embeds the unstructured features,
/// branch 2 embeds the structured features (or the sample's boosted-feature
/// vector in the bfv variant), the embeddings are fused by concatenation or
/// element-wise product, and a trainable head maps the fused vector to class
/// logits under softmax cross-entropy.
class FusionModel {
public:
    FusionModel() = default;

    /// Joint end-to-end training; the epoch with the best validation metric
    /// is retained. gbm must be non-null for the bfv variant. Product fusion
    /// with unequal branch output dims fails before training starts.
    static FusionModel train(const Dataset& train, const Dataset& valid, const GbmModel* gbm,
                             const FusionConfig& config);

    std::vector<int> predict(const Dataset& data, const GbmModel* gbm) const;
    /// Softmax class probabilities for pre-assembled branch inputs.
    Matrix probabilities(const Matrix& input_u, const Matrix& input_2) const;
    Matrix logits(const Matrix& input_u, const Matrix& input_2) const;

    /// Mean softmax cross-entropy on pre-assembled branch inputs.
    double cross_entropy(const Matrix& input_u, const Matrix& input_2,
                         const std::vector<int>& labels) const;

    /// Gradients of cross_entropy() for every parameter (branch 1, branch 2,
    /// head), used by the finite-difference checks.
    struct Gradients {
        std::vector<DenseLayer> branch_u;
        std::vector<DenseLayer> branch_2;
        std::vector<DenseLayer> head;
    };
    Gradients gradients(const Matrix& input_u, const Matrix& input_2,
                        const std::vector<int>& labels) const;

    /// Branch-2 input for a dataset: raw x_s (baseline) or standardized BFVs.
    Matrix branch2_input(const Dataset& data, const GbmModel* gbm) const;

    FusionVariant variant() const { return variant_; }
    FusionKind fusion() const { return fusion_; }
    int num_classes() const { return num_classes_; }
    const std::vector<DenseLayer>& branch_u_layers() const { return branch_u_; }
    const std::vector<DenseLayer>& branch_2_layers() const { return branch_2_; }
    const std::vector<DenseLayer>& head_layers() const { return head_; }
    std::vector<DenseLayer>& branch_u_layers() { return branch_u_; }
    std::vector<DenseLayer>& branch_2_layers() { return branch_2_; }
    std::vector<DenseLayer>& head_layers() { return head_; }
    const Standardizer& bfv_standardizer() const { return bfv_standardizer_; }
    const std::vector<FusionEpochRecord>& history() const { return history_; }
    int best_epoch() const { return best_epoch_; }

    // Deserialization hook.
    FusionModel(int num_classes, FusionKind fusion, FusionVariant variant,
                std::vector<DenseLayer> branch_u, std::vector<DenseLayer> branch_2,
                std::vector<DenseLayer> head, Standardizer bfv_standardizer);

    bool operator==(const FusionModel&) const = default;

private:
    int num_classes_ = 0;
    FusionKind fusion_ = FusionKind::concat;
    FusionVariant variant_ = FusionVariant::baseline;
    std::vector<DenseLayer> branch_u_;
    std::vector<DenseLayer> branch_2_;
    std::vector<DenseLayer> head_;
    Standardizer bfv_standardizer_;
    std::vector<FusionEpochRecord> history_;
    int best_epoch_ = -1;
};

} // namespace duoboost
