#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "duoboost/mcloss.hpp"
#include "oracles.hpp"

using namespace duoboost;

TEST_SUITE("mcloss") {

TEST_CASE("loss: frozen examples") {
    const Codebook cb2(2);
    const Codebook cb3(3);
    CHECK(loss(Vec{0, 0, 0}, 0, cb3) == doctest::Approx(3.0));
    CHECK(loss(Vec{0, 0, 0}, 2, cb3) == doctest::Approx(3.0));
    CHECK(loss(Vec{2, 0}, 0, cb2) == doctest::Approx(1.3678794411714423).epsilon(1e-12));
    CHECK(loss(Vec{-2, 2}, 0, cb2) == doctest::Approx(8.38905609893065).epsilon(1e-12));
}

TEST_CASE("loss >= 1 always; errors on bad input") {
    const Codebook cb(3);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto inst = oracle::random_instance(s, 3, 1, 5.0);
        CHECK(loss(inst.scores.row(0), inst.labels[0], cb) >= 1.0);
    }
    CHECK_THROWS_AS(loss(Vec{1.0, 2.0}, 0, cb), std::invalid_argument);
    CHECK_THROWS_AS(loss(Vec{1.0, std::nan(""), 0.0}, 0, cb), std::invalid_argument);
    CHECK_THROWS_AS(loss(Vec{0, 0, 0}, 3, cb), std::invalid_argument);
}

TEST_CASE("risk: sums losses; mean reported") {
    const Codebook cb(2);
    Matrix scores(10, 2);
    std::vector<int> labels(10, 1);
    const auto r = risk(scores, labels, cb);
    CHECK(r.total_risk == doctest::Approx(20.0));
    CHECK(r.mean_loss == doctest::Approx(2.0));

    // n = 1 reduces to loss
    Matrix one(1, 2);
    one(0, 0) = 1.3;
    one(0, 1) = -0.4;
    CHECK(risk(one, {1}, cb).total_risk == doctest::Approx(loss(one.row(0), 1, cb)));
}

TEST_CASE("risk matches per-sample summation oracle to 1e-12") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const int m = 2 + static_cast<int>(s % 4);
        const auto inst = oracle::random_instance(s * 31 + 7, m, 25, 2.0);
        const Codebook cb(m);
        const double lib = risk(inst.scores, inst.labels, cb).total_risk;
        const double ref = oracle::naive_risk(inst.scores, inst.labels, m);
        CHECK(lib == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("first_order_residual: frozen examples") {
    const Codebook cb2(2);
    const Codebook cb3(3);
    const Vec w1 = first_order_residual(Vec{0, 0}, 0, cb2);
    CHECK(w1[0] == doctest::Approx(0.5));
    CHECK(w1[1] == doctest::Approx(-0.5));

    const Vec w2 = first_order_residual(Vec{0, 0, 0}, 1, cb3);
    CHECK(w2[0] == doctest::Approx(-0.5));
    CHECK(w2[1] == doctest::Approx(1.0));
    CHECK(w2[2] == doctest::Approx(-0.5));

    const Vec w3 = first_order_residual(Vec{2, 0}, 0, cb2);
    CHECK(w3[0] == doctest::Approx(0.18393972058572117).epsilon(1e-12));
    CHECK(w3[1] == doctest::Approx(-0.18393972058572117).epsilon(1e-12));
}

TEST_CASE("second_order_residual: frozen examples") {
    const Codebook cb2(2);
    const Codebook cb3(3);
    const Vec a = second_order_residual(Vec{0, 0}, 0, cb2);
    CHECK(a[0] == doctest::Approx(1.0));
    CHECK(a[1] == doctest::Approx(-1.0));

    const Vec b = second_order_residual(Vec{0, 0, 0}, 0, cb3);
    CHECK(b[0] == doctest::Approx(2.0));
    CHECK(b[1] == doctest::Approx(-1.0));
    CHECK(b[2] == doctest::Approx(-1.0));

    const Vec c = second_order_residual(Vec{2, 0}, 0, cb2);
    CHECK(c[0] == doctest::Approx(0.6065306597126334).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(-0.6065306597126334).epsilon(1e-12));
}

TEST_CASE("curvature_scalar: frozen examples") {
    const Codebook cb2(2);
    const Codebook cb3(3);
    CHECK(curvature_scalar(Vec{0, 0, 0}, 1, cb3) == doctest::Approx(4.0));
    CHECK(curvature_scalar(Vec{0, 0}, 0, cb2) == doctest::Approx(2.0));
    CHECK(curvature_scalar(Vec{2, 0}, 0, cb2) ==
          doctest::Approx(0.7357588823428847).epsilon(1e-12));
}

TEST_CASE("residual terms match the naive direct-summation oracle to 1e-12") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const int m = 2 + static_cast<int>(s % 4);
        const auto inst = oracle::random_instance(s * 17 + 3, m, 1, 3.0);
        const Codebook cb(m);
        const Vec f = inst.scores.row_copy(0);
        const int y = inst.labels[0];

        const Vec w = first_order_residual(f, y, cb);
        const Vec w_ref = oracle::naive_first_order_residual(f, y, m);
        const Vec wt = second_order_residual(f, y, cb);
        const Vec wt_ref = oracle::naive_second_order_residual(f, y, m);
        for (int c = 0; c < m; ++c) {
            CHECK(w[c] == doctest::Approx(w_ref[c]).epsilon(1e-12));
            CHECK(wt[c] == doctest::Approx(wt_ref[c]).epsilon(1e-12));
        }
        CHECK(curvature_scalar(f, y, cb) ==
              doctest::Approx(oracle::naive_curvature_scalar(f, y, m)).epsilon(1e-12));
    }
}

TEST_CASE("residual components sum to zero (exactly at f = 0)") {
    for (int m = 2; m <= 5; ++m) {
        const Codebook cb(m);
        const Vec zero(m, 0.0);
        for (int y = 0; y < m; ++y) {
            const Vec w = first_order_residual(zero, y, cb);
            double sum = 0.0;
            for (double v : w) sum += v;
            CHECK(sum == 0.0);
        }
    }
    // and to rounding error for arbitrary scores
    for (std::uint64_t s = 0; s < 30; ++s) {
        const int m = 2 + static_cast<int>(s % 4);
        const auto inst = oracle::random_instance(s * 13 + 1, m, 1, 4.0);
        const Codebook cb(m);
        const Vec w = first_order_residual(inst.scores.row(0), inst.labels[0], cb);
        const Vec wt = second_order_residual(inst.scores.row(0), inst.labels[0], cb);
        double sw = 0.0, swt = 0.0, mag = 1.0;
        for (int c = 0; c < m; ++c) {
            sw += w[c];
            swt += wt[c];
            mag = std::max({mag, std::abs(w[c]), std::abs(wt[c])});
        }
        CHECK(std::abs(sw) <= 1e-12 * mag);
        CHECK(std::abs(swt) <= 1e-12 * mag);
    }
}

TEST_CASE("exponent shifting keeps large-score residuals finite") {
    // the unshifted path computes exp(-f[y]/2) * exp(f[k]/2) = 0 * inf = nan
    // here; only the score differences matter and those are moderate
    const Codebook cb(2);
    const Vec f{1500.0, 1501.0};
    const Vec w = first_order_residual(f, 0, cb);
    REQUIRE(all_finite(w));
    CHECK(w[0] == doctest::Approx(0.5 * std::exp(0.5)).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(-0.5 * std::exp(0.5)).epsilon(1e-12));
    CHECK(std::isfinite(curvature_scalar(f, 0, cb)));
    CHECK(curvature_scalar(f, 0, cb) == doctest::Approx(2.0 * std::exp(0.5)).epsilon(1e-12));
    const Vec wt = second_order_residual(f, 0, cb);
    REQUIRE(all_finite(wt));
    CHECK(wt[0] == doctest::Approx(std::exp(0.25)).epsilon(1e-12));

    const Vec g{-1400.0, -1399.5};
    CHECK(all_finite(first_order_residual(g, 1, cb)));
}

TEST_CASE("first_order_decrease: trivial identities") {
    Matrix w(4, 2);
    for (std::size_t i = 0; i < w.data().size(); ++i) w.data()[i] = 0.25 * (i + 1);
    const Matrix zeros(4, 2);
    CHECK(first_order_decrease(zeros, w) == 0.0);

    double norm2 = 0.0;
    for (double v : w.data()) norm2 += v * v;
    CHECK(first_order_decrease(w, w) == doctest::Approx(norm2));
    CHECK_THROWS_AS((first_order_decrease(Matrix(3, 2), w)), std::invalid_argument);
}

TEST_CASE("first_order_decrease equals the negated finite-difference risk derivative") {
    int checked = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const int ms[] = {2, 3, 5};
        const int m = ms[s % 3];
        const int n = 5 + static_cast<int>((s * 7) % 46);
        const auto inst = oracle::random_instance(s * 101 + 11, m, n, 1.0);
        const Codebook cb(m);
        const Matrix g = oracle::random_matrix(s * 103 + 29, n, m, 1.0);

        const PseudoResiduals res = compute_residuals(inst.scores, inst.labels, cb, false);
        const double analytic = first_order_decrease(g, res.first_order);
        const double fd = oracle::fd_risk_derivative(inst.scores, inst.labels, m, g, 1e-5);
        REQUIRE(std::abs(analytic) > 1e-3);  // instance is informative
        CHECK(std::abs(-fd - analytic) / std::abs(analytic) < 1e-6);
        ++checked;
    }
    CHECK(checked == 20);
}

TEST_CASE("risk_quadratic_surrogate: fixed points and oracle equality") {
    const int m = 3, n = 8;
    const auto inst = oracle::random_instance(42, m, n, 1.5);
    const Codebook cb(m);
    const PseudoResiduals res = compute_residuals(inst.scores, inst.labels, cb, true);
    const double base = risk(inst.scores, inst.labels, cb).total_risk;
    const Matrix g = oracle::random_matrix(7, n, m, 1.0);
    const Matrix h = oracle::random_matrix(9, n, m, 1.0);

    CHECK(risk_quadratic_surrogate(g, h, res, base, 0.0, 0.0) == base);

    // zero learners leave only the curvature mass
    const Matrix zeros(n, m);
    double curvature_sum = 0.0;
    for (double v : res.curvature) curvature_sum += v;
    CHECK(risk_quadratic_surrogate(zeros, zeros, res, base, 1.0, 1.0) ==
          doctest::Approx(base + 2.0 * 0.5 * 0.25 * curvature_sum).epsilon(1e-12));

    for (const auto [eps, delta] : {std::pair{0.3, 0.7}, {0.0, 1.0}, {1.2, 0.4}}) {
        const double lib = risk_quadratic_surrogate(g, h, res, base, eps, delta);
        const double ref = oracle::naive_quadratic_surrogate(g, h, inst.scores, inst.labels, m,
                                                             base, eps, delta);
        CHECK(lib == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("surrogate linear coefficients match first_order_decrease") {
    const int m = 2, n = 12;
    const auto inst = oracle::random_instance(5, m, n, 1.0);
    const Codebook cb(m);
    const PseudoResiduals res = compute_residuals(inst.scores, inst.labels, cb, true);
    const double base = risk(inst.scores, inst.labels, cb).total_risk;
    const Matrix g = oracle::random_matrix(21, n, m, 1.0);
    const Matrix h = oracle::random_matrix(23, n, m, 1.0);

    // central differencing extracts the linear coefficient of a polynomial exactly
    const double e = 0.5;
    const double eps_coeff = (risk_quadratic_surrogate(g, h, res, base, e, 0.0) -
                              risk_quadratic_surrogate(g, h, res, base, -e, 0.0)) /
                             (2.0 * e);
    const double delta_coeff = (risk_quadratic_surrogate(g, h, res, base, 0.0, e) -
                                risk_quadratic_surrogate(g, h, res, base, 0.0, -e)) /
                               (2.0 * e);
    CHECK(eps_coeff == doctest::Approx(-first_order_decrease(g, res.first_order)).epsilon(1e-9));
    CHECK(delta_coeff == doctest::Approx(-first_order_decrease(h, res.first_order)).epsilon(1e-9));
}

} // TEST_SUITE
