#include "duoboost/stepsearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "duoboost/rng.hpp"

namespace duoboost {

StepMode step_mode_from_string(const std::string& name) {
    if (name == "fixed") return StepMode::fixed;
    if (name == "grid") return StepMode::grid;
    if (name == "adaptive" || name == "adaptive_random") return StepMode::adaptive_random;
    throw std::invalid_argument("unknown step mode: " + name);
}

std::string to_string(StepMode m) {
    switch (m) {
        case StepMode::fixed: return "fixed";
        case StepMode::grid: return "grid";
        default: return "adaptive_random";
    }
}

namespace {

struct Search {
    const std::function<double(double, double)>& risk_eval;
    StepResult result;
    bool have_optimum = false;

    void consider(double eps, double delta) {
        const double r = risk_eval(eps, delta);
        ++result.evaluations;
        if (!std::isfinite(r)) {
            ++result.discarded;
            return;
        }
        if (!have_optimum || r < result.risk_at_optimum) {
            result.eps = eps;
            result.delta = delta;
            result.risk_at_optimum = r;
            have_optimum = true;
        }
    }
};

} // namespace

StepResult search_steps(const std::function<double(double, double)>& risk_eval,
                        const StepConfig& config) {
    if (config.eps_max < 0.0 || config.delta_max < 0.0)
        throw std::invalid_argument("search_steps: bounds must be nonnegative");

    const bool use_eps = config.axes != StepAxes::delta_only;
    const bool use_delta = config.axes != StepAxes::eps_only;
    const double eps_max = use_eps ? config.eps_max : 0.0;
    const double delta_max = use_delta ? config.delta_max : 0.0;

    if (config.mode == StepMode::fixed) {
        StepResult r;
        r.eps = use_eps ? config.fixed_eps : 0.0;
        r.delta = use_delta ? config.fixed_delta : 0.0;
        r.risk_at_optimum = risk_eval(r.eps, r.delta);
        r.evaluations = 1;
        return r;
    }

    Search search{risk_eval, {}, false};

    if (config.mode == StepMode::grid) {
        if (config.grid_points < 1) throw std::invalid_argument("search_steps: grid_points must be >= 1");
        auto axis = [&](double bound) {
            std::vector<double> v;
            if (config.grid_points == 1 || bound == 0.0) {
                v.push_back(0.0);
            } else {
                for (int i = 0; i < config.grid_points; ++i)
                    v.push_back(bound * i / (config.grid_points - 1));
            }
            return v;
        };
        for (double e : axis(eps_max))
            for (double d : axis(delta_max)) search.consider(e, d);
    } else {
        if (config.explore_points < 1 || config.refine_iterations < 1)
            throw std::invalid_argument("search_steps: adaptive budget must be >= 1 per phase");
        // anchors: (0,0) guarantees non-increasing training risk; (0.1,0.1)
        // is the conventional default step
        search.consider(0.0, 0.0);
        search.consider(use_eps ? std::min(0.1, eps_max) : 0.0,
                        use_delta ? std::min(0.1, delta_max) : 0.0);

        Rng rng(config.seed);
        std::uniform_real_distribution<double> ue(0.0, eps_max);
        std::uniform_real_distribution<double> ud(0.0, delta_max);
        for (int i = 0; i < config.explore_points; ++i) {
            const double e = use_eps ? ue(rng) : 0.0;
            const double d = use_delta ? ud(rng) : 0.0;
            search.consider(e, d);
        }

        double sigma_e = eps_max / 4.0;
        double sigma_d = delta_max / 4.0;
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < config.refine_iterations; ++i) {
            const double prev_best = search.have_optimum ? search.result.risk_at_optimum
                                                         : std::numeric_limits<double>::infinity();
            double e = search.result.eps;
            double d = search.result.delta;
            if (use_eps) e = std::clamp(e + sigma_e * gauss(rng), 0.0, eps_max);
            if (use_delta) d = std::clamp(d + sigma_d * gauss(rng), 0.0, delta_max);
            search.consider(e, d);
            if (!search.have_optimum || search.result.risk_at_optimum >= prev_best) {
                sigma_e *= 0.5;
                sigma_d *= 0.5;
            }
        }
    }

    if (!search.have_optimum)
        throw std::runtime_error("search_steps: every candidate produced a non-finite risk");
    return search.result;
}

} // namespace duoboost
