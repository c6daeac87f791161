#include <chrono>
#include <stdexcept>

#include "duoboost/boosting.hpp"
#include "duoboost/types.hpp"

namespace duoboost {

TwoLearnerMode two_learner_mode_from_string(const std::string& name) {
    if (name == "both") return TwoLearnerMode::both;
    if (name == "only_g") return TwoLearnerMode::only_g;
    if (name == "only_s") return TwoLearnerMode::only_s;
    throw std::invalid_argument("unknown two-learner mode: " + name);
}

std::string to_string(TwoLearnerMode m) {
    switch (m) {
        case TwoLearnerMode::both: return "both";
        case TwoLearnerMode::only_g: return "only_g";
        default: return "only_s";
    }
}

Matrix TwoLearnerModel::decision_scores(const Matrix& features_u, const Matrix& features_s,
                                        int num_stages) const {
    const std::size_t n = features_u.rows();
    if (features_s.rows() != n)
        throw std::invalid_argument("TwoLearnerModel: modality sample counts differ");
    Matrix scores(n, num_classes);
    const std::size_t upto = num_stages < 0 ? stages.size()
                                            : std::min<std::size_t>(num_stages, stages.size());
    for (std::size_t t = 0; t < upto; ++t) {
        const StagePair& stage = stages[t];
        if (stage.g && stage.eps != 0.0) {
            const Matrix out = stage.g->predict(features_u);
            for (std::size_t i = 0; i < n; ++i)
                for (int c = 0; c < num_classes; ++c) scores(i, c) += stage.eps * out(i, c);
        }
        if (stage.h && stage.delta != 0.0) {
            const Matrix out = stage.h->predict(features_s);
            for (std::size_t i = 0; i < n; ++i)
                for (int c = 0; c < num_classes; ++c) scores(i, c) += stage.delta * out(i, c);
        }
    }
    return scores;
}

std::vector<int> TwoLearnerModel::predict(const Matrix& features_u, const Matrix& features_s,
                                          int num_stages) const {
    const Codebook codebook(num_classes);
    return classify_rows(decision_scores(features_u, features_s, num_stages), codebook);
}

namespace detail {

void check_extend(Matrix& scores, const Matrix& out, double step) {
    for (std::size_t i = 0; i < scores.rows(); ++i)
        for (std::size_t c = 0; c < scores.cols(); ++c) scores(i, c) += step * out(i, c);
}

void check_datasets(const Dataset& train, const Dataset& valid) {
    train.validate();
    valid.validate();
    if (train.num_classes != valid.num_classes || train.dim_u != valid.dim_u ||
        train.dim_s != valid.dim_s)
        throw std::invalid_argument("train/valid datasets disagree on classes or dimensions");
    if (train.samples.empty()) throw std::invalid_argument("empty training dataset");
}

int best_iteration_by_metric(const std::vector<IterationRecord>& history) {
    int best = -1;
    double best_metric = -1.0;
    for (const auto& rec : history) {
        if (rec.val_metric > best_metric) {
            best_metric = rec.val_metric;
            best = rec.iter;
        }
    }
    return best;
}

} // namespace detail

TwoLearnerModel train_two_learner(const Dataset& train, const Dataset& valid,
                                  const TwoLearnerConfig& config) {
    detail::check_datasets(train, valid);
    if (config.num_iterations < 0) throw std::invalid_argument("train_two_learner: N must be >= 0");

    const Codebook codebook(train.num_classes);
    const Matrix train_u = train.features_u();
    const Matrix train_s = train.features_s();
    const Matrix valid_u = valid.features_u();
    const Matrix valid_s = valid.features_s();
    const std::vector<int> train_y = train.labels();
    const std::vector<int> valid_y = valid.labels();
    const std::size_t n = train.size();
    const int m = train.num_classes;

    const bool fit_g = config.mode != TwoLearnerMode::only_s;
    const bool fit_h = config.mode != TwoLearnerMode::only_g;

    TwoLearnerModel model;
    model.num_classes = m;
    model.mode = config.mode;

    // scores cached per sample and updated incrementally; the step search
    // evaluates the training risk dozens of times per iteration
    Matrix scores(n, m);
    Matrix valid_scores(valid.size(), m);

    for (int t = 0; t < config.num_iterations; ++t) {
        const auto t0 = std::chrono::steady_clock::now();

        const PseudoResiduals residuals = compute_residuals(scores, train_y, codebook, false);

        StagePair stage;
        Matrix g_out(n, m), h_out(n, m);
        if (fit_g) {
            MlpConfig mlp_cfg = config.mlp;
            mlp_cfg.seed = stage_mlp_seed(config.seed, t);
            const Mlp* warm = config.warm_start && !model.stages.empty() && model.stages.back().g
                                  ? &*model.stages.back().g
                                  : nullptr;
            stage.g = Mlp::fit(train_u, residuals.first_order, mlp_cfg, warm);
            g_out = stage.g->predict(train_u);
        }
        if (fit_h) {
            stage.h = RegressionTree::fit(train_s, residuals.first_order, config.tree);
            h_out = stage.h->predict(train_s);
        }

        StepConfig step_cfg = config.step;
        step_cfg.seed = stage_step_seed(config.seed, t);
        step_cfg.axes = config.mode == TwoLearnerMode::both
                            ? StepAxes::both
                            : (config.mode == TwoLearnerMode::only_g ? StepAxes::eps_only
                                                                     : StepAxes::delta_only);
        auto risk_eval = [&](double eps, double delta) {
            double total = 0.0;
            Vec f(m);
            for (std::size_t i = 0; i < n; ++i) {
                for (int c = 0; c < m; ++c)
                    f[c] = scores(i, c) + eps * g_out(i, c) + delta * h_out(i, c);
                total += loss(f, train_y[i], codebook);
            }
            return total;
        };
        const StepResult step = search_steps(risk_eval, step_cfg);

        stage.eps = fit_g ? step.eps : 0.0;
        stage.delta = fit_h ? step.delta : 0.0;
        if (fit_g) detail::check_extend(scores, g_out, stage.eps);
        if (fit_h) detail::check_extend(scores, h_out, stage.delta);
        if (fit_g && stage.eps != 0.0)
            detail::check_extend(valid_scores, stage.g->predict(valid_u), stage.eps);
        if (fit_h && stage.delta != 0.0)
            detail::check_extend(valid_scores, stage.h->predict(valid_s), stage.delta);

        IterationRecord rec;
        rec.iter = t;
        rec.risk = step.risk_at_optimum;
        rec.eps = stage.eps;
        rec.delta = stage.delta;
        if (!valid_y.empty()) {
            const auto preds = classify_rows(valid_scores, codebook);
            rec.val_metric = metric_value(confusion_and_metrics(preds, valid_y, m), config.metric);
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        model.stages.push_back(std::move(stage));
        model.history.push_back(std::move(rec));
    }

    model.best_iteration = detail::best_iteration_by_metric(model.history);
    return model;
}

} // namespace duoboost
