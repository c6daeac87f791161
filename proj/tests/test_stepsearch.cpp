#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "duoboost/stepsearch.hpp"

using namespace duoboost;

TEST_SUITE("stepsearch") {

TEST_CASE("grid mode finds the lattice minimum exactly") {
    StepConfig cfg;
    cfg.mode = StepMode::grid;
    cfg.grid_points = 21;  // spacing 0.05 over [0,1]
    auto bowl = [](double e, double d) {
        return (e - 0.3) * (e - 0.3) + (d - 0.2) * (d - 0.2);
    };
    const StepResult r = search_steps(bowl, cfg);
    CHECK(r.eps == doctest::Approx(0.30));
    CHECK(r.delta == doctest::Approx(0.20));
    CHECK(r.evaluations == 21 * 21);
}

TEST_CASE("fixed mode returns the configured constants") {
    StepConfig cfg;
    cfg.mode = StepMode::fixed;
    int calls = 0;
    auto risk = [&](double, double) {
        ++calls;
        return 123.0;
    };
    const StepResult r = search_steps(risk, cfg);
    CHECK(r.eps == 0.1);
    CHECK(r.delta == 0.1);
    CHECK(r.risk_at_optimum == 123.0);  // recorded for logging
    CHECK(calls == 1);

    cfg.fixed_eps = 0.25;
    cfg.fixed_delta = 0.75;
    const StepResult r2 = search_steps(risk, cfg);
    CHECK(r2.eps == 0.25);
    CHECK(r2.delta == 0.75);
}

TEST_CASE("constant risk returns the (0,0) anchor (first-found tie-break)") {
    StepConfig cfg;
    cfg.mode = StepMode::adaptive_random;
    cfg.seed = 5;
    const StepResult r = search_steps([](double, double) { return 1.0; }, cfg);
    CHECK(r.eps == 0.0);
    CHECK(r.delta == 0.0);

    StepConfig grid;
    grid.mode = StepMode::grid;
    const StepResult g = search_steps([](double, double) { return 1.0; }, grid);
    CHECK(g.eps == 0.0);
    CHECK(g.delta == 0.0);
}

TEST_CASE("adaptive search: anchor guarantees, budget, determinism") {
    StepConfig cfg;
    cfg.mode = StepMode::adaptive_random;
    cfg.explore_points = 10;
    cfg.refine_iterations = 20;
    cfg.seed = 77;
    auto bowl = [](double e, double d) {
        return 5.0 + (e - 0.42) * (e - 0.42) + (d - 0.13) * (d - 0.13);
    };
    const StepResult r = search_steps(bowl, cfg);
    CHECK(r.evaluations == 2 + 10 + 20);  // anchors + explore + refine
    CHECK(r.risk_at_optimum <= bowl(0.0, 0.0));
    CHECK(r.risk_at_optimum <= bowl(0.1, 0.1));
    CHECK(r.eps >= 0.0);
    CHECK(r.eps <= 1.0);
    CHECK(r.delta >= 0.0);
    CHECK(r.delta <= 1.0);
    // refinement should land near the optimum
    CHECK(r.risk_at_optimum < 5.05);

    const StepResult again = search_steps(bowl, cfg);
    CHECK(again.eps == r.eps);
    CHECK(again.delta == r.delta);
    CHECK(again.risk_at_optimum == r.risk_at_optimum);
    CHECK(again.evaluations == r.evaluations);
}

TEST_CASE("non-finite candidates are discarded, never returned") {
    StepConfig cfg;
    cfg.mode = StepMode::adaptive_random;
    cfg.seed = 9;
    // risk blows up everywhere except near the origin
    auto risky = [](double e, double d) {
        if (e + d > 0.2) return std::numeric_limits<double>::infinity();
        return 1.0 + e + d;
    };
    const StepResult r = search_steps(risky, cfg);
    CHECK(std::isfinite(r.risk_at_optimum));
    CHECK(r.eps + r.delta <= 0.2);
    CHECK(r.discarded > 0);

    // all-infinite risks cannot produce an optimum
    auto hopeless = [](double, double) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS_AS(search_steps(hopeless, cfg), std::runtime_error);
}

TEST_CASE("axis restriction pins the inactive step to zero") {
    StepConfig cfg;
    cfg.mode = StepMode::adaptive_random;
    cfg.axes = StepAxes::delta_only;
    cfg.seed = 4;
    auto bowl = [](double e, double d) { return e * 100.0 + (d - 0.6) * (d - 0.6); };
    const StepResult r = search_steps(bowl, cfg);
    CHECK(r.eps == 0.0);
    CHECK(r.delta > 0.3);

    cfg.axes = StepAxes::eps_only;
    const StepResult r2 = search_steps([](double e, double) { return (e - 0.5) * (e - 0.5); }, cfg);
    CHECK(r2.delta == 0.0);
    CHECK(std::abs(r2.eps - 0.5) < 0.2);

    StepConfig grid;
    grid.mode = StepMode::grid;
    grid.axes = StepAxes::delta_only;
    grid.grid_points = 11;
    const StepResult g = search_steps([](double, double d) { return (d - 0.5) * (d - 0.5); }, grid);
    CHECK(g.eps == 0.0);
    CHECK(g.delta == doctest::Approx(0.5));
    CHECK(g.evaluations == 11);
}

TEST_CASE("invalid configurations are rejected") {
    StepConfig cfg;
    cfg.eps_max = -1.0;
    CHECK_THROWS_AS(search_steps([](double, double) { return 0.0; }, cfg), std::invalid_argument);
    StepConfig budget;
    budget.mode = StepMode::adaptive_random;
    budget.explore_points = 0;
    CHECK_THROWS_AS(search_steps([](double, double) { return 0.0; }, budget),
                    std::invalid_argument);
}

} // TEST_SUITE
