#pragma once

#include <vector>

#include "duoboost/matrix.hpp"

namespace duoboost {

struct TreeParams {
    int max_depth = 3;
    int min_samples_leaf = 1;
};

struct TreeNode {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;
    double gain = 0.0;       // squared-error reduction achieved by this split
    int left = -1;
    int right = -1;
    Vec value;               // leaf mean target (populated on leaves only)

    bool is_leaf() const { return feature < 0; }
};

/// Vector-output CART regression tree. Splits greedily maximize the total
/// squared-error reduction summed over all target components; thresholds sit
/// at midpoints between consecutive distinct sorted feature values. Ties go
/// to the lowest feature index, then the lowest threshold. Routing: value
/// strictly below the threshold goes left, equal or above goes right.
class RegressionTree {
public:
    RegressionTree() = default;
    RegressionTree(std::vector<TreeNode> nodes, int input_dim);

    static RegressionTree fit(const Matrix& features, const Matrix& targets, const TreeParams& params);

    Vec predict_one(std::span<const double> x) const;
    Matrix predict(const Matrix& features) const;

    /// Index (into nodes()) of the leaf the sample is routed to.
    int leaf_index(std::span<const double> x) const;

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::vector<TreeNode>& nodes() { return nodes_; }
    int input_dim() const { return input_dim_; }
    int output_dim() const;
    int depth() const;

    /// Summed split gain attributed to one feature across the whole tree.
    double feature_gain(int feature) const;

    bool operator==(const RegressionTree&) const = default;

private:
    std::vector<TreeNode> nodes_;
    int input_dim_ = 0;
};

} // namespace duoboost
