#pragma once

#include <string>
#include <vector>

#include "duoboost/boosting.hpp"
#include "duoboost/config.hpp"
#include "duoboost/datasets.hpp"
#include "duoboost/fusion.hpp"
#include "duoboost/serialize.hpp"

namespace duoboost {

inline const std::vector<std::string> kModelKinds = {
    "baseline", "bfvdnn", "2wl", "2wl2o", "2wl_fix", "2wl2o_fix", "1wl_s", "1wl_u", "gbm_only"};

/// Typed view over a flat experiment configuration.
struct ExperimentConfig {
    KeyValueConfig raw;
    std::string model_kind;
    Metric metric = Metric::f1;
    std::uint64_t seed = 0;

    static ExperimentConfig from(const KeyValueConfig& cfg);

    GenSpec gen_spec() const;
    MlpConfig mlp_config() const;
    TreeParams tree_params() const;
    StepConfig step_config() const;
    GbmParams gbm_params() const;
    FusionConfig fusion_config() const;
    TwoLearnerConfig two_learner_config() const;
    SecondOrderConfig second_order_config() const;
};

/// Load `data.train`/`data.valid` paths when present, otherwise generate
/// from the gen.* keys.
GeneratedPair resolve_datasets(const ExperimentConfig& cfg);

/// Train one roster entry; the artifact carries the canonical config echo.
ModelArtifact train_model(const ExperimentConfig& cfg, const Dataset& train, const Dataset& valid);

/// Predictions of a loaded artifact on a dataset.
std::vector<int> artifact_predict(const ModelArtifact& artifact, const Dataset& data);

double evaluate_artifact(const ModelArtifact& artifact, const Dataset& data, Metric metric);

struct CompareRow {
    std::string kind;
    double metric_value = 0.0;
    double relative_improvement_pct = 0.0;  // vs the baseline row
};

struct CompareReport {
    std::vector<CompareRow> rows;
    std::string metric_name;
    std::string table_text;  // rendered table
    std::string csv_text;
};

/// Train the configured roster on one dataset pair and tabulate metrics and
/// relative improvements vs the `baseline` row. repeats > 1 reruns each
/// entry with shifted seeds and reports the mean metric. When out_dir is
/// nonempty, per-model artifacts land in out_dir/<kind>/ (repeat 0 only).
CompareReport run_compare(const ExperimentConfig& cfg, const Dataset& train, const Dataset& valid,
                          int repeats, const std::string& out_dir);

/// Minimal SVG line chart: one polyline per named series of (minutes, metric).
std::string render_traces_svg(
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series);

/// Cumulative (minutes, val_metric) trace from an artifact's history.
std::vector<std::pair<double, double>> artifact_trace(const ModelArtifact& artifact);

} // namespace duoboost
