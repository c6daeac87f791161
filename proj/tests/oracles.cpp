#include "oracles.hpp"

#include <algorithm>

#include "duoboost/boosting.hpp"

namespace oracle {

using namespace duoboost;

std::vector<GdMcBoostStage> gdmcboost_reference(const Dataset& train, int iterations,
                                                const TreeParams& tree_params,
                                                StepConfig step_template, std::uint64_t seed) {
    const Codebook codebook(train.num_classes);
    const Matrix features = train.features_s();
    const std::vector<int> labels = train.labels();
    const std::size_t n = train.size();
    const int m = train.num_classes;

    Matrix scores(n, m);
    std::vector<GdMcBoostStage> stages;
    for (int t = 0; t < iterations; ++t) {
        const PseudoResiduals residuals = compute_residuals(scores, labels, codebook, false);
        GdMcBoostStage stage;
        stage.tree = RegressionTree::fit(features, residuals.first_order, tree_params);
        const Matrix out = stage.tree.predict(features);

        StepConfig step_cfg = step_template;
        step_cfg.axes = StepAxes::delta_only;
        step_cfg.seed = stage_step_seed(seed, t);
        auto risk_eval = [&](double, double delta) {
            double total = 0.0;
            Vec f(m);
            for (std::size_t i = 0; i < n; ++i) {
                for (int c = 0; c < m; ++c) f[c] = scores(i, c) + delta * out(i, c);
                total += loss(f, labels[i], codebook);
            }
            return total;
        };
        const StepResult res = search_steps(risk_eval, step_cfg);
        stage.delta = res.delta;
        stage.risk = res.risk_at_optimum;
        for (std::size_t i = 0; i < n; ++i)
            for (int c = 0; c < m; ++c) scores(i, c) += stage.delta * out(i, c);
        stages.push_back(std::move(stage));
    }
    return stages;
}

} // namespace oracle
