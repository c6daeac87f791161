#include <doctest.h>

#include <stdexcept>

#include "duoboost/metrics.hpp"
#include "duoboost/types.hpp"

using namespace duoboost;

TEST_SUITE("core") {

TEST_CASE("codebook codewords are unit vectors at pairwise squared distance 2") {
    const Codebook cb(4);
    for (int i = 0; i < 4; ++i) {
        for (int k = 0; k < 4; ++k) {
            double d2 = 0.0;
            for (int c = 0; c < 4; ++c) {
                const double diff = cb.codeword(i)[c] - cb.codeword(k)[c];
                d2 += diff * diff;
            }
            CHECK(d2 == (i == k ? 0.0 : 2.0));
        }
        CHECK(cb.codeword(i)[i] == 1.0);
    }
    CHECK_THROWS_AS(Codebook(1), std::invalid_argument);
}

TEST_CASE("classify: argmax with lowest-index tie-break") {
    const Codebook cb3(3);
    CHECK(classify(Vec{0.0, 0.0, 0.0}, cb3) == 0);       // all ties
    CHECK(classify(Vec{-1.0, 3.0, 2.0}, cb3) == 1);
    const Codebook cb2(2);
    CHECK(classify(Vec{0.2, 0.2}, cb2) == 0);            // two-way tie
    CHECK_THROWS_AS(classify(Vec{1.0, 2.0, 3.0}, cb2), std::invalid_argument);
}

TEST_CASE("classify is invariant under positive scaling") {
    const Codebook cb(4);
    const Vec f{0.3, -0.2, 0.9, 0.1};
    const int base = classify(f, cb);
    for (double scale : {0.01, 0.5, 7.0, 1234.0}) {
        Vec scaled(f);
        for (auto& v : scaled) v *= scale;
        CHECK(classify(scaled, cb) == base);
    }
}

TEST_CASE("confusion_and_metrics: hand-computed binary case") {
    const auto r = confusion_and_metrics({1, 1, 0, 0}, {1, 0, 0, 0}, 2);
    CHECK(r.accuracy == doctest::Approx(0.75));
    CHECK(r.f1 == doctest::Approx(2.0 * (0.5 * 1.0) / (0.5 + 1.0)));
    CHECK(r.confusion(0, 0) == 2.0);
    CHECK(r.confusion(0, 1) == 1.0);
    CHECK(r.confusion(1, 0) == 0.0);
    CHECK(r.confusion(1, 1) == 1.0);
}

TEST_CASE("confusion_and_metrics: identity and total miss") {
    const std::vector<int> y{0, 1, 2, 1, 0, 2};
    const auto perfect = confusion_and_metrics(y, y, 3);
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.f1 == 1.0);

    const auto miss = confusion_and_metrics({0, 0, 0}, {1, 1, 1}, 2);
    CHECK(miss.accuracy == 0.0);
    CHECK(miss.f1 == 0.0);
}

TEST_CASE("confusion_and_metrics: errors and row sums") {
    CHECK_THROWS_AS(confusion_and_metrics({}, {}, 2), std::invalid_argument);
    CHECK_THROWS_AS(confusion_and_metrics({0, 1}, {0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(confusion_and_metrics({0, 2}, {0, 1}, 2), std::invalid_argument);

    const std::vector<int> labels{0, 0, 1, 2, 2, 2, 1, 0};
    const std::vector<int> preds{0, 1, 1, 2, 0, 2, 2, 0};
    const auto r = confusion_and_metrics(preds, labels, 3);
    std::vector<int> counts(3, 0);
    for (int y : labels) ++counts[y];
    for (int k = 0; k < 3; ++k) {
        double row = 0.0;
        for (int c = 0; c < 3; ++c) row += r.confusion(k, c);
        CHECK(row == static_cast<double>(counts[k]));
    }
    CHECK(r.accuracy >= 0.0);
    CHECK(r.accuracy <= 1.0);
    CHECK(r.f1 >= 0.0);
    CHECK(r.f1 <= 1.0);
}

TEST_CASE("binary F1 uses class 1 as positive, not the macro average") {
    // 4 samples: tp=1 fp=1 fn=0 tn=2 for class 1
    const std::vector<int> labels{1, 0, 0, 0};
    const std::vector<int> preds{1, 1, 0, 0};
    const auto r = confusion_and_metrics(preds, labels, 2);
    // class-1 F1
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
    // macro average over both classes would differ: class-0 F1 = 0.8
    const double macro = 0.5 * (0.8 + 2.0 / 3.0);
    CHECK(r.f1 != doctest::Approx(macro));
}

TEST_CASE("relative_improvement") {
    CHECK(relative_improvement(0.5235, 0.5) == doctest::Approx(4.70));
    CHECK(relative_improvement(0.5, 0.5) == 0.0);
    CHECK(relative_improvement(0.46065, 0.5) == doctest::Approx(-7.87));
    CHECK_THROWS_AS(relative_improvement(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(relative_improvement(0.5, -1.0), std::domain_error);
}

TEST_CASE("dataset validate flags mismatches") {
    Dataset ds;
    ds.num_classes = 2;
    ds.dim_u = 2;
    ds.dim_s = 1;
    ds.samples.push_back({{0.1, 0.2}, {0.3}, 1});
    CHECK_NOTHROW(ds.validate());
    ds.samples.push_back({{0.1}, {0.3}, 0});
    CHECK_THROWS_AS(ds.validate(), std::invalid_argument);
    ds.samples.pop_back();
    ds.samples.push_back({{0.1, 0.2}, {0.3}, 2});
    CHECK_THROWS_AS(ds.validate(), std::invalid_argument);
}

} // TEST_SUITE
