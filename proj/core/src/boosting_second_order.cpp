#include <chrono>
#include <stdexcept>

#include "duoboost/boosting.hpp"
#include "duoboost/types.hpp"

namespace duoboost {

namespace detail {
void check_extend(Matrix& scores, const Matrix& out, double step);
void check_datasets(const Dataset& train, const Dataset& valid);
int best_iteration_by_metric(const std::vector<IterationRecord>& history);
} // namespace detail

Matrix second_order_targets(const PseudoResiduals& residuals, double eps, double delta,
                            WeakFamily family) {
    const Matrix& w = residuals.first_order;
    const Matrix& wt = residuals.second_order;
    if (wt.rows() != w.rows())
        throw std::invalid_argument("second_order_targets: second-order residuals missing");
    if (eps < 0.0 || delta < 0.0)
        throw std::invalid_argument("second_order_targets: steps must be nonnegative");

    const double own = family == WeakFamily::g ? eps : delta;
    const double w_coeff = own - 0.5 * eps * delta;
    const double wt_coeff = 0.25 * own * own;

    Matrix targets(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.data().size(); ++i)
        targets.data()[i] = w_coeff * w.data()[i] - wt_coeff * wt.data()[i];
    return targets;
}

TwoLearnerModel train_two_learner_second_order(const Dataset& train, const Dataset& valid,
                                               const SecondOrderConfig& config) {
    detail::check_datasets(train, valid);
    if (config.outer_iterations < 0)
        throw std::invalid_argument("train_two_learner_second_order: N1 must be >= 0");
    if (config.inner_iterations < 1)
        throw std::invalid_argument("train_two_learner_second_order: N2 must be >= 1");

    const Codebook codebook(train.num_classes);
    const Matrix train_u = train.features_u();
    const Matrix train_s = train.features_s();
    const Matrix valid_u = valid.features_u();
    const Matrix valid_s = valid.features_s();
    const std::vector<int> train_y = train.labels();
    const std::vector<int> valid_y = valid.labels();
    const std::size_t n = train.size();
    const int m = train.num_classes;

    TwoLearnerModel model;
    model.num_classes = m;
    model.mode = TwoLearnerMode::both;

    Matrix scores(n, m);
    Matrix valid_scores(valid.size(), m);

    struct InnerCandidate {
        StagePair stage;
        Matrix g_out;
        Matrix h_out;
        double risk = 0.0;
        int j = -1;
    };

    for (int t = 0; t < config.outer_iterations; ++t) {
        const auto t0 = std::chrono::steady_clock::now();

        // w and w~ are fixed for the whole inner loop
        const PseudoResiduals residuals = compute_residuals(scores, train_y, codebook, true);

        double eps_j = config.eps0;
        double delta_j = config.delta0;
        InnerCandidate best;
        Vec inner_risks;

        for (int j = 0; j < config.inner_iterations; ++j) {
            InnerCandidate cand;
            cand.j = j;

            const Matrix g_targets = second_order_targets(residuals, eps_j, delta_j, WeakFamily::g);
            const Matrix h_targets = second_order_targets(residuals, eps_j, delta_j, WeakFamily::h);

            MlpConfig mlp_cfg = config.mlp;
            mlp_cfg.seed = stage_mlp_seed(config.seed, t, j);
            cand.stage.g = Mlp::fit(train_u, g_targets, mlp_cfg);
            cand.stage.h = RegressionTree::fit(train_s, h_targets, config.tree);
            cand.g_out = cand.stage.g->predict(train_u);
            cand.h_out = cand.stage.h->predict(train_s);

            StepConfig step_cfg = config.step;
            step_cfg.seed = stage_step_seed(config.seed, t, j);
            auto risk_eval = [&](double eps, double delta) {
                double total = 0.0;
                Vec f(m);
                for (std::size_t i = 0; i < n; ++i) {
                    for (int c = 0; c < m; ++c)
                        f[c] = scores(i, c) + eps * cand.g_out(i, c) + delta * cand.h_out(i, c);
                    total += loss(f, train_y[i], codebook);
                }
                return total;
            };
            const StepResult step = search_steps(risk_eval, step_cfg);
            cand.stage.eps = step.eps;
            cand.stage.delta = step.delta;
            cand.risk = step.risk_at_optimum;
            inner_risks.push_back(cand.risk);

            // the searched steps seed the next inner fit
            eps_j = step.eps;
            delta_j = step.delta;

            if (best.j < 0 || cand.risk < best.risk) best = std::move(cand);
        }

        detail::check_extend(scores, best.g_out, best.stage.eps);
        detail::check_extend(scores, best.h_out, best.stage.delta);
        if (best.stage.eps != 0.0)
            detail::check_extend(valid_scores, best.stage.g->predict(valid_u), best.stage.eps);
        if (best.stage.delta != 0.0)
            detail::check_extend(valid_scores, best.stage.h->predict(valid_s), best.stage.delta);

        IterationRecord rec;
        rec.iter = t;
        rec.risk = best.risk;
        rec.eps = best.stage.eps;
        rec.delta = best.stage.delta;
        rec.inner_j = best.j;
        rec.inner_risks = std::move(inner_risks);
        if (!valid_y.empty()) {
            const auto preds = classify_rows(valid_scores, codebook);
            rec.val_metric = metric_value(confusion_and_metrics(preds, valid_y, m), config.metric);
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        model.stages.push_back(std::move(best.stage));
        model.history.push_back(std::move(rec));
    }

    model.best_iteration = detail::best_iteration_by_metric(model.history);
    return model;
}

} // namespace duoboost
