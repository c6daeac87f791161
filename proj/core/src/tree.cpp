#include "duoboost/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace duoboost {

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

struct Builder {
    const Matrix& features;
    const Matrix& targets;
    TreeParams params;
    std::vector<TreeNode> nodes;

    // Sum of squared target norms and per-component sums over an index set.
    double node_sse(const std::vector<int>& idx, Vec& mean_out) const {
        const std::size_t m = targets.cols();
        Vec sum(m, 0.0);
        double sq = 0.0;
        for (int i : idx) {
            const auto t = targets.row(i);
            for (std::size_t c = 0; c < m; ++c) sum[c] += t[c];
            sq += dot(t, t);
        }
        mean_out.assign(m, 0.0);
        double sse = sq;
        for (std::size_t c = 0; c < m; ++c) {
            mean_out[c] = sum[c] / static_cast<double>(idx.size());
            sse -= sum[c] * sum[c] / static_cast<double>(idx.size());
        }
        return std::max(sse, 0.0);
    }

    SplitChoice best_split(const std::vector<int>& idx, double parent_sse) const {
        const std::size_t m = targets.cols();
        const int n = static_cast<int>(idx.size());
        SplitChoice best;

        std::vector<int> order(idx);
        Vec left_sum(m);
        for (std::size_t f = 0; f < features.cols(); ++f) {
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double va = features(a, f), vb = features(b, f);
                return va < vb || (va == vb && a < b);
            });
            std::fill(left_sum.begin(), left_sum.end(), 0.0);
            double left_sq = 0.0, total_sq = 0.0;
            Vec total_sum(m, 0.0);
            for (int i : order) {
                const auto t = targets.row(i);
                for (std::size_t c = 0; c < m; ++c) total_sum[c] += t[c];
                total_sq += dot(t, t);
            }
            for (int p = 0; p < n - 1; ++p) {
                const auto t = targets.row(order[p]);
                for (std::size_t c = 0; c < m; ++c) left_sum[c] += t[c];
                left_sq += dot(t, t);
                const int nl = p + 1, nr = n - nl;
                const double vl = features(order[p], f), vr = features(order[p + 1], f);
                if (vl >= vr) continue;  // no threshold between equal values
                if (nl < params.min_samples_leaf || nr < params.min_samples_leaf) continue;
                double sse_l = left_sq, sse_r = total_sq - left_sq;
                for (std::size_t c = 0; c < m; ++c) {
                    sse_l -= left_sum[c] * left_sum[c] / nl;
                    const double rs = total_sum[c] - left_sum[c];
                    sse_r -= rs * rs / nr;
                }
                const double gain = parent_sse - std::max(sse_l, 0.0) - std::max(sse_r, 0.0);
                if (gain > best.gain) {
                    best.feature = static_cast<int>(f);
                    best.threshold = 0.5 * (vl + vr);
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    int build(const std::vector<int>& idx, int depth) {
        Vec mean;
        const double sse = node_sse(idx, mean);

        auto make_leaf = [&]() {
            TreeNode leaf;
            leaf.value = mean;
            nodes.push_back(std::move(leaf));
            return static_cast<int>(nodes.size() - 1);
        };

        if (depth >= params.max_depth || static_cast<int>(idx.size()) < 2 * params.min_samples_leaf)
            return make_leaf();

        const SplitChoice split = best_split(idx, sse);
        if (split.feature < 0 || split.gain <= 1e-12 * std::max(1.0, sse)) return make_leaf();

        std::vector<int> left_idx, right_idx;
        for (int i : idx) {
            if (features(i, split.feature) < split.threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }

        TreeNode node;
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.gain = split.gain;
        nodes.push_back(std::move(node));
        const int self = static_cast<int>(nodes.size() - 1);
        nodes[self].left = build(left_idx, depth + 1);
        nodes[self].right = build(right_idx, depth + 1);
        return self;
    }
};

} // namespace

RegressionTree::RegressionTree(std::vector<TreeNode> nodes, int input_dim)
    : nodes_(std::move(nodes)), input_dim_(input_dim) {}

RegressionTree RegressionTree::fit(const Matrix& features, const Matrix& targets, const TreeParams& params) {
    if (features.rows() == 0) throw std::invalid_argument("RegressionTree::fit: empty input");
    if (features.rows() != targets.rows())
        throw std::invalid_argument("RegressionTree::fit: feature/target count mismatch");
    if (features.cols() == 0) throw std::invalid_argument("RegressionTree::fit: zero feature dimension");
    if (!all_finite(targets)) throw std::invalid_argument("RegressionTree::fit: non-finite targets");

    Builder builder{features, targets, params, {}};
    std::vector<int> idx(features.rows());
    std::iota(idx.begin(), idx.end(), 0);
    // build() appends the root first, so index 0 is always the root
    builder.build(idx, 0);

    RegressionTree tree;
    tree.nodes_ = std::move(builder.nodes);
    tree.input_dim_ = static_cast<int>(features.cols());
    return tree;
}

int RegressionTree::leaf_index(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim_)
        throw std::invalid_argument("RegressionTree: input dimension mismatch");
    if (nodes_.empty()) throw std::logic_error("RegressionTree: not fitted");
    int id = 0;
    while (!nodes_[id].is_leaf())
        id = x[nodes_[id].feature] < nodes_[id].threshold ? nodes_[id].left : nodes_[id].right;
    return id;
}

Vec RegressionTree::predict_one(std::span<const double> x) const {
    return nodes_[leaf_index(x)].value;
}

Matrix RegressionTree::predict(const Matrix& features) const {
    Matrix out(features.rows(), output_dim());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const Vec v = predict_one(features.row(i));
        for (std::size_t c = 0; c < v.size(); ++c) out(i, c) = v[c];
    }
    return out;
}

int RegressionTree::output_dim() const {
    for (const auto& n : nodes_)
        if (n.is_leaf()) return static_cast<int>(n.value.size());
    return 0;
}

int RegressionTree::depth() const {
    if (nodes_.empty()) return 0;
    // depth of node 0
    struct Walk {
        const std::vector<TreeNode>& nodes;
        int operator()(int id) const {
            const TreeNode& n = nodes[id];
            if (n.is_leaf()) return 0;
            return 1 + std::max((*this)(n.left), (*this)(n.right));
        }
    };
    return Walk{nodes_}(0);
}

double RegressionTree::feature_gain(int feature) const {
    double g = 0.0;
    for (const auto& n : nodes_)
        if (!n.is_leaf() && n.feature == feature) g += n.gain;
    return g;
}

} // namespace duoboost
