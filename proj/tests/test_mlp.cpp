#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "duoboost/mlp.hpp"
#include "oracles.hpp"

using namespace duoboost;

namespace {

// Central finite difference of mse() with respect to every parameter.
void check_gradients(Mlp& net, const Matrix& x, const Matrix& t, double tol) {
    const auto analytic = net.gradients(x, t);
    const double step = 1e-5;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        auto probe = [&](double& param, double expected) {
            const double saved = param;
            param = saved + step;
            const double up = net.mse(x, t);
            param = saved - step;
            const double down = net.mse(x, t);
            param = saved;
            const double fd = (up - down) / (2.0 * step);
            const double denom = std::max({std::abs(fd), std::abs(expected), 1e-6});
            CHECK(std::abs(fd - expected) / denom < tol);
        };
        for (std::size_t i = 0; i < net.layers()[l].weights.data().size(); ++i)
            probe(net.layers()[l].weights.data()[i], analytic[l].weights.data()[i]);
        for (std::size_t i = 0; i < net.layers()[l].bias.size(); ++i)
            probe(net.layers()[l].bias[i], analytic[l].bias[i]);
    }
}

} // namespace

TEST_SUITE("mlp") {

TEST_CASE("identity single linear layer reproduces its input") {
    Mlp net = Mlp::init({3, 3}, 1);
    for (std::size_t o = 0; o < 3; ++o) {
        for (std::size_t i = 0; i < 3; ++i) net.layers()[0].weights(o, i) = o == i ? 1.0 : 0.0;
        net.layers()[0].bias[o] = 0.0;
    }
    const Vec x{0.4, -1.2, 3.3};
    const Vec y = net.predict_one(x);
    for (int c = 0; c < 3; ++c) CHECK(y[c] == doctest::Approx(x[c]));
}

TEST_CASE("all-zero weights and biases give zero output") {
    Mlp net = Mlp::init({4, 6, 2}, 2);
    for (auto& layer : net.layers()) {
        for (auto& w : layer.weights.data()) w = 0.0;
        for (auto& b : layer.bias) b = 0.0;
    }
    const Vec y = net.predict_one(Vec{1.0, 2.0, 3.0, 4.0});
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 0.0);
}

TEST_CASE("linear map is recovered by a zero-hidden-layer net") {
    // targets from a known linear map; least squares has a perfect solution
    const int n = 64, d = 3, m = 2;
    const Matrix x = oracle::random_matrix(5, n, d, 1.0);
    Matrix t(n, m);
    for (int i = 0; i < n; ++i) {
        t(i, 0) = 0.5 * x(i, 0) - 1.25 * x(i, 1) + 0.3;
        t(i, 1) = -0.75 * x(i, 2) + 0.1 * x(i, 0);
    }
    MlpConfig cfg;
    cfg.hidden_sizes = {};
    cfg.epochs = 200;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.05;
    cfg.optimizer = OptimizerKind::sgd;
    cfg.seed = 3;
    const Mlp net = Mlp::fit(x, t, cfg);
    CHECK(net.mse(x, t) < 1e-3);
}

TEST_CASE("zero targets with zeroed final layer need no updates") {
    const Matrix x = oracle::random_matrix(9, 10, 3, 1.0);
    const Matrix t(10, 2);
    Mlp net = Mlp::init({3, 4, 2}, 7);
    for (auto& w : net.layers().back().weights.data()) w = 0.0;
    for (auto& b : net.layers().back().bias) b = 0.0;
    CHECK(net.mse(x, t) == 0.0);
    const auto grads = net.gradients(x, t);
    for (const auto& g : grads)
        for (double v : g.weights.data()) CHECK(v == 0.0);
}

TEST_CASE("backprop gradients match central finite differences") {
    const int n = 5;
    const Matrix x = oracle::random_matrix(11, n, 4, 1.0);
    const Matrix t = oracle::random_matrix(13, n, 2, 1.0);

    SUBCASE("two hidden layers") {
        Mlp net = Mlp::init({4, 6, 5, 2}, 17);
        check_gradients(net, x, t, 1e-4);
    }
    SUBCASE("single linear layer") {
        Mlp net = Mlp::init({4, 2}, 19);
        check_gradients(net, x, t, 1e-4);
    }
}

TEST_CASE("rmsprop first step magnitude and sign on a 1-parameter problem") {
    // one input, one output, one weight, no bias updates matter: target 0,
    // input 1, weight w0 -> gradient positive for positive w0
    Matrix x(1, 1);
    x(0, 0) = 1.0;
    Matrix t(1, 1);

    MlpConfig cfg;
    cfg.hidden_sizes = {};
    cfg.epochs = 1;
    cfg.batch_size = 1;
    cfg.learning_rate = 0.01;
    cfg.optimizer = OptimizerKind::rmsprop;
    cfg.seed = 23;

    Mlp warm = Mlp::init({1, 1}, 23);
    warm.layers()[0].weights(0, 0) = 0.8;
    warm.layers()[0].bias[0] = 0.0;
    const double grad = warm.gradients(x, t)[0].weights(0, 0);
    CHECK(grad > 0.0);  // same sign as the plain gradient

    const Mlp stepped = Mlp::fit(x, t, cfg, &warm);
    const double delta = stepped.layers()[0].weights(0, 0) - 0.8;
    CHECK(delta < 0.0);  // moves against the gradient
    // accumulator starts at zero, so the first step is lr/sqrt(1-decay)-ish
    const double expected = cfg.learning_rate / std::sqrt(1.0 - cfg.rms_decay);
    CHECK(std::abs(delta) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("determinism: same seed, same model; divergence raises") {
    const Matrix x = oracle::random_matrix(31, 30, 3, 1.0);
    const Matrix t = oracle::random_matrix(37, 30, 2, 1.0);
    MlpConfig cfg;
    cfg.hidden_sizes = {5};
    cfg.epochs = 3;
    cfg.seed = 101;
    const Mlp a = Mlp::fit(x, t, cfg);
    const Mlp b = Mlp::fit(x, t, cfg);
    CHECK(a == b);
    const Mlp c = Mlp::fit(x, t, [&] {
        auto alt = cfg;
        alt.seed = 102;
        return alt;
    }());
    CHECK(!(a == c));

    // absurd learning rate blows the loss up
    MlpConfig bad = cfg;
    bad.optimizer = OptimizerKind::sgd;
    bad.learning_rate = 1e18;
    bad.epochs = 30;
    CHECK_THROWS_WITH_AS(Mlp::fit(x, t, bad), doctest::Contains("diverged at epoch"),
                         std::runtime_error);
}

TEST_CASE("predict rejects wrong input dimension") {
    const Mlp net = Mlp::init({3, 2}, 1);
    CHECK_THROWS_AS(net.predict(Matrix(4, 2)), std::invalid_argument);
}

} // TEST_SUITE
