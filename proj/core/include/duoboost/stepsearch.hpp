#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace duoboost {

enum class StepMode { fixed, grid, adaptive_random };
enum class StepAxes { both, eps_only, delta_only };

StepMode step_mode_from_string(const std::string& name);
std::string to_string(StepMode m);

struct StepConfig {
    StepMode mode = StepMode::adaptive_random;
    StepAxes axes = StepAxes::both;
    double fixed_eps = 0.1;
    double fixed_delta = 0.1;
    double eps_max = 1.0;
    double delta_max = 1.0;
    int grid_points = 11;        // per active axis, endpoints included
    int explore_points = 10;
    int refine_iterations = 20;
    std::uint64_t seed = 0;
};

struct StepResult {
    double eps = 0.0;
    double delta = 0.0;
    double risk_at_optimum = 0.0;
    int evaluations = 0;
    int discarded = 0;   // non-finite candidates skipped
};

/// Minimize risk_eval over the step box [0, eps_max] x [0, delta_max].
///
/// fixed: returns the configured constants (risk recorded for logging).
/// grid: best over an axis-uniform lattice that includes 0 on each axis.
/// adaptive_random: anchors (0,0) and (0.1,0.1), then uniform exploration,
/// then Gaussian refinement around the incumbent with the step scale halved
/// whenever a candidate fails to improve. First-found wins ties, so a
/// constant risk returns the (0,0) anchor. Non-finite candidate risks are
/// counted and skipped, never returned as the optimum.
StepResult search_steps(const std::function<double(double, double)>& risk_eval,
                        const StepConfig& config);

} // namespace duoboost
