#include <doctest.h>

#include <map>
#include <numeric>
#include <stdexcept>

#include "duoboost/tree.hpp"
#include "oracles.hpp"

using namespace duoboost;

namespace {

double train_mse(const RegressionTree& tree, const Matrix& x, const Matrix& t) {
    const Matrix pred = tree.predict(x);
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.data().size(); ++i) {
        const double d = pred.data()[i] - t.data()[i];
        sum += d * d;
    }
    return sum / static_cast<double>(pred.data().size());
}

} // namespace

TEST_SUITE("tree") {

TEST_CASE("single sample produces a single leaf with the target") {
    Matrix x(1, 2);
    x(0, 0) = 3.0;
    Matrix t(1, 3);
    t(0, 0) = 1.0;
    t(0, 2) = -2.0;
    const auto tree = RegressionTree::fit(x, t, {4, 1});
    CHECK(tree.nodes().size() == 1);
    const Vec p = tree.predict_one(x.row(0));
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 0.0);
    CHECK(p[2] == -2.0);
}

TEST_CASE("constant targets yield a single leaf regardless of features") {
    const Matrix x = oracle::random_matrix(3, 40, 5, 2.0);
    Matrix t(40, 2);
    for (std::size_t i = 0; i < t.rows(); ++i) {
        t(i, 0) = 0.7;
        t(i, 1) = -0.1;
    }
    const auto tree = RegressionTree::fit(x, t, {5, 1});
    CHECK(tree.nodes().size() == 1);
    CHECK(tree.predict_one(x.row(7))[0] == doctest::Approx(0.7));
}

TEST_CASE("depth-1 split on the 4-sample instance; threshold 1.5, exact leaves") {
    Matrix x(4, 1);
    for (int i = 0; i < 4; ++i) x(i, 0) = i;
    Matrix t(4, 2);
    t(0, 0) = 1;  t(0, 1) = 0;
    t(1, 0) = 1;  t(1, 1) = 0;
    t(2, 0) = 0;  t(2, 1) = 1;
    t(3, 0) = 0;  t(3, 1) = 1;

    // exhaustive enumeration agrees on the split
    std::vector<int> idx{0, 1, 2, 3};
    const auto ref = oracle::exhaustive_best_split(x, t, idx, 1);
    CHECK(ref.feature == 0);
    CHECK(ref.threshold == doctest::Approx(1.5));

    const auto tree = RegressionTree::fit(x, t, {1, 1});
    REQUIRE(!tree.nodes()[0].is_leaf());
    CHECK(tree.nodes()[0].feature == 0);
    CHECK(tree.nodes()[0].threshold == doctest::Approx(1.5));
    CHECK(tree.nodes()[0].gain == doctest::Approx(ref.gain));
    CHECK(train_mse(tree, x, t) == doctest::Approx(0.0));
    for (int i = 0; i < 4; ++i) {
        const Vec p = tree.predict_one(x.row(i));
        CHECK(p[0] == doctest::Approx(t(i, 0)));
        CHECK(p[1] == doctest::Approx(t(i, 1)));
    }
}

TEST_CASE("root split matches the exhaustive oracle on random instances") {
    for (std::uint64_t s = 0; s < 25; ++s) {
        const int n = 12 + static_cast<int>(s % 20);
        const int d = 3;
        const int m = 2;
        const Matrix x = oracle::random_matrix(s * 7 + 1, n, d, 1.0);
        const Matrix t = oracle::random_matrix(s * 11 + 5, n, m, 1.0);
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        const auto ref = oracle::exhaustive_best_split(x, t, idx, 1);
        const auto tree = RegressionTree::fit(x, t, {1, 1});
        REQUIRE(!tree.nodes()[0].is_leaf());
        CHECK(tree.nodes()[0].feature == ref.feature);
        CHECK(tree.nodes()[0].threshold == doctest::Approx(ref.threshold));
        CHECK(tree.nodes()[0].gain == doctest::Approx(ref.gain).epsilon(1e-9));
    }
}

TEST_CASE("boundary value routes right (equality goes right)") {
    Matrix x(4, 1);
    for (int i = 0; i < 4; ++i) x(i, 0) = i;
    Matrix t(4, 1);
    for (int i = 0; i < 4; ++i) t(i, 0) = i < 2 ? 0.0 : 1.0;
    const auto tree = RegressionTree::fit(x, t, {1, 1});
    const double thr = tree.nodes()[0].threshold;
    const Vec at_threshold{thr};
    const Vec just_below{thr - 1e-9};
    CHECK(tree.predict_one(at_threshold)[0] == doctest::Approx(1.0));  // right leaf
    CHECK(tree.predict_one(just_below)[0] == doctest::Approx(0.0));
}

TEST_CASE("exact fit at unbounded depth with distinct feature values") {
    const int n = 16;
    Matrix x(n, 1);
    Matrix t(n, 2);
    duoboost::Rng rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = i * 0.37;
        t(i, 0) = u(rng);
        t(i, 1) = u(rng);
    }
    // greedy splitting keeps going while any leaf mixes distinct targets, so
    // depth n suffices for an exact fit
    const auto tree = RegressionTree::fit(x, t, {n, 1});
    CHECK(train_mse(tree, x, t) <= 1e-24);

    // balanced instance: monotone targets split evenly, so log2(n) levels do
    Matrix lin(n, 1);
    Matrix lint(n, 1);
    for (int i = 0; i < n; ++i) {
        lin(i, 0) = i;
        lint(i, 0) = i;
    }
    const auto balanced = RegressionTree::fit(lin, lint, {4, 1});
    CHECK(train_mse(balanced, lin, lint) <= 1e-24);
    CHECK(balanced.depth() == 4);
}

TEST_CASE("training MSE is non-increasing in max_depth") {
    const Matrix x = oracle::random_matrix(17, 60, 4, 1.0);
    const Matrix t = oracle::random_matrix(19, 60, 3, 1.0);
    double prev = 1e300;
    for (int depth = 0; depth <= 6; ++depth) {
        const auto tree = RegressionTree::fit(x, t, {depth, 1});
        const double mse = train_mse(tree, x, t);
        CHECK(mse <= prev + 1e-12);
        prev = mse;
    }
}

TEST_CASE("min_samples_leaf is honored") {
    const Matrix x = oracle::random_matrix(23, 30, 2, 1.0);
    const Matrix t = oracle::random_matrix(29, 30, 1, 1.0);
    const auto tree = RegressionTree::fit(x, t, {8, 5});
    // count samples reaching each leaf
    std::map<int, int> counts;
    for (std::size_t i = 0; i < x.rows(); ++i) ++counts[tree.leaf_index(x.row(i))];
    for (const auto& [leaf, count] : counts) CHECK(count >= 5);
}

TEST_CASE("errors: empty input and dimension mismatch") {
    Matrix empty;
    CHECK_THROWS_AS((RegressionTree::fit(empty, empty, {3, 1})), std::invalid_argument);
    Matrix x(3, 2);
    Matrix t(3, 1);
    const auto tree = RegressionTree::fit(x, t, {2, 1});
    const Vec wrong{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(tree.predict_one(wrong), std::invalid_argument);
}

} // TEST_SUITE
