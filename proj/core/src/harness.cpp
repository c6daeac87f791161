#include "duoboost/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "duoboost/rng.hpp"

namespace duoboost {

ExperimentConfig ExperimentConfig::from(const KeyValueConfig& cfg) {
    ExperimentConfig out;
    out.raw = cfg;
    out.model_kind = cfg.get_str("model.kind", "");
    if (!out.model_kind.empty() &&
        std::find(kModelKinds.begin(), kModelKinds.end(), out.model_kind) == kModelKinds.end())
        throw std::runtime_error("config: unknown model.kind '" + out.model_kind + "'");
    out.metric = metric_from_string(cfg.get_str("metric", "f1"));
    out.seed = cfg.get_u64("seed", 0);
    return out;
}

GenSpec ExperimentConfig::gen_spec() const {
    GenSpec spec;
    spec.kind = gen_kind_from_string(raw.get_str("gen.kind", "xor_bimodal"));
    spec.n_train = raw.get_int("gen.n_train", spec.n_train);
    spec.n_valid = raw.get_int("gen.n_valid", spec.n_valid);
    spec.dim_u = raw.get_int("gen.dim_u", spec.dim_u);
    spec.dim_s = raw.get_int("gen.dim_s", spec.dim_s);
    spec.num_classes = raw.get_int("gen.classes", spec.kind == GenKind::shapes ? 3 : 2);
    spec.noise_rate = raw.get_double("gen.noise", spec.noise_rate);
    spec.seed = raw.get_u64("gen.seed", seed);
    spec.class0_prior = raw.get_double("gen.class0_prior", spec.class0_prior);
    spec.blob_mean = raw.get_double("gen.blob_mean", spec.blob_mean);
    spec.image_side = raw.get_int("gen.image_side", spec.image_side);
    spec.bit_noise = raw.get_double("gen.bit_noise", spec.bit_noise);
    spec.leakage = raw.get_double("gen.leakage", spec.leakage);
    spec.importance_split = raw.get_bool("gen.importance_split", spec.importance_split);
    spec.total_columns = raw.get_int("gen.columns", spec.total_columns);
    spec.informative_columns = raw.get_int("gen.informative", spec.informative_columns);
    spec.csv_path = raw.get_str("gen.csv", "");
    return spec;
}

MlpConfig ExperimentConfig::mlp_config() const {
    MlpConfig cfg;
    cfg.hidden_sizes = raw.get_int_list("mlp.hidden", {16});
    cfg.epochs = raw.get_int("mlp.epochs", 5);
    cfg.batch_size = raw.get_int("mlp.batch", 32);
    cfg.learning_rate = raw.get_double("mlp.lr", 0.01);
    cfg.optimizer = optimizer_from_string(raw.get_str("mlp.optimizer", "rmsprop"));
    cfg.rms_decay = raw.get_double("mlp.rms_decay", 0.9);
    cfg.rms_stabilizer = raw.get_double("mlp.rms_stabilizer", 1e-8);
    return cfg;
}

TreeParams ExperimentConfig::tree_params() const {
    TreeParams p;
    p.max_depth = raw.get_int("tree.max_depth", 3);
    p.min_samples_leaf = raw.get_int("tree.min_samples_leaf", 1);
    return p;
}

StepConfig ExperimentConfig::step_config() const {
    StepConfig cfg;
    cfg.mode = step_mode_from_string(raw.get_str("step.mode", "adaptive"));
    cfg.fixed_eps = raw.get_double("step.eps", 0.1);
    cfg.fixed_delta = raw.get_double("step.delta", 0.1);
    const double bound = raw.get_double("step.bound", 1.0);
    cfg.eps_max = raw.get_double("step.eps_bound", bound);
    cfg.delta_max = raw.get_double("step.delta_bound", bound);
    cfg.grid_points = raw.get_int("step.grid_points", 11);
    cfg.explore_points = raw.get_int("step.explore", 10);
    cfg.refine_iterations = raw.get_int("step.refine", 20);
    return cfg;
}

GbmParams ExperimentConfig::gbm_params() const {
    GbmParams p;
    p.num_stages = raw.get_int("gbm.stages", 50);
    p.learning_rate = raw.get_double("gbm.lr", 0.1);
    p.max_depth = raw.get_int("gbm.max_depth", 3);
    p.min_samples_leaf = raw.get_int("gbm.min_samples_leaf", 1);
    return p;
}

FusionConfig ExperimentConfig::fusion_config() const {
    FusionConfig cfg;
    cfg.branch_u_sizes = raw.get_int_list("fusion.branch_u", {16});
    cfg.branch_s_sizes = raw.get_int_list("fusion.branch_s", {16});
    cfg.head_hidden = raw.get_int_list("fusion.head", {});
    cfg.fusion = fusion_kind_from_string(raw.get_str("fusion.kind", "concat"));
    cfg.epochs = raw.get_int("fusion.epochs", 50);
    cfg.batch_size = raw.get_int("fusion.batch", 32);
    cfg.learning_rate = raw.get_double("fusion.lr", 0.01);
    cfg.optimizer = optimizer_from_string(raw.get_str("fusion.optimizer", "rmsprop"));
    cfg.rms_decay = raw.get_double("fusion.rms_decay", 0.9);
    cfg.rms_stabilizer = raw.get_double("fusion.rms_stabilizer", 1e-8);
    cfg.standardize_bfv = raw.get_bool("fusion.standardize_bfv", true);
    cfg.metric = metric;
    cfg.seed = seed;
    return cfg;
}

TwoLearnerConfig ExperimentConfig::two_learner_config() const {
    TwoLearnerConfig cfg;
    cfg.num_iterations = raw.get_int("boost.iterations", 20);
    cfg.mlp = mlp_config();
    cfg.tree = tree_params();
    cfg.step = step_config();
    cfg.metric = metric;
    cfg.warm_start = raw.get_bool("boost.warm_start", false);
    cfg.seed = seed;
    return cfg;
}

SecondOrderConfig ExperimentConfig::second_order_config() const {
    SecondOrderConfig cfg;
    cfg.outer_iterations = raw.get_int("boost.iterations", 20);
    cfg.inner_iterations = raw.get_int("boost.inner", 1);
    cfg.eps0 = raw.get_double("boost.eps0", 0.1);
    cfg.delta0 = raw.get_double("boost.delta0", 0.1);
    cfg.mlp = mlp_config();
    cfg.tree = tree_params();
    cfg.step = step_config();
    cfg.metric = metric;
    cfg.seed = seed;
    return cfg;
}

GeneratedPair resolve_datasets(const ExperimentConfig& cfg) {
    if (cfg.raw.has("data.train")) {
        GeneratedPair pair;
        pair.train = load_dataset(cfg.raw.require("data.train"));
        if (cfg.raw.has("data.valid")) {
            pair.valid = load_dataset(cfg.raw.require("data.valid"));
        } else {
            pair.valid.num_classes = pair.train.num_classes;
            pair.valid.dim_u = pair.train.dim_u;
            pair.valid.dim_s = pair.train.dim_s;
        }
        return pair;
    }
    return generate(cfg.gen_spec());
}

ModelArtifact train_model(const ExperimentConfig& cfg, const Dataset& train, const Dataset& valid) {
    if (cfg.model_kind.empty()) throw std::runtime_error("config: missing required key 'model.kind'");
    ModelArtifact artifact;
    artifact.kind = cfg.model_kind;
    artifact.config_echo = cfg.raw;

    const std::string& kind = cfg.model_kind;
    if (kind == "baseline" || kind == "bfvdnn") {
        FusionConfig fusion_cfg = cfg.fusion_config();
        fusion_cfg.variant = kind == "bfvdnn" ? FusionVariant::bfv : FusionVariant::baseline;
        if (kind == "bfvdnn") {
            artifact.gbm =
                GbmModel::fit(train.features_s(), train.labels(), train.num_classes, cfg.gbm_params());
            artifact.fusion =
                FusionModel::train(train, valid, &*artifact.gbm, fusion_cfg);
        } else {
            artifact.fusion = FusionModel::train(train, valid, nullptr, fusion_cfg);
        }
    } else if (kind == "gbm_only") {
        artifact.gbm =
            GbmModel::fit(train.features_s(), train.labels(), train.num_classes, cfg.gbm_params());
    } else if (kind == "2wl2o" || kind == "2wl2o_fix") {
        SecondOrderConfig so_cfg = cfg.second_order_config();
        if (kind == "2wl2o_fix") so_cfg.step.mode = StepMode::fixed;
        artifact.two_wl = train_two_learner_second_order(train, valid, so_cfg);
    } else {
        TwoLearnerConfig wl_cfg = cfg.two_learner_config();
        if (kind == "2wl_fix") wl_cfg.step.mode = StepMode::fixed;
        if (kind == "1wl_s") wl_cfg.mode = TwoLearnerMode::only_s;
        if (kind == "1wl_u") wl_cfg.mode = TwoLearnerMode::only_g;
        artifact.two_wl = train_two_learner(train, valid, wl_cfg);
    }
    return artifact;
}

std::vector<int> artifact_predict(const ModelArtifact& artifact, const Dataset& data) {
    if (artifact.two_wl) {
        // best-iteration selection: predict with the stage prefix that had
        // the best validation metric
        const int upto = artifact.two_wl->best_iteration >= 0
                             ? artifact.two_wl->best_iteration + 1
                             : -1;
        return artifact.two_wl->predict(data.features_u(), data.features_s(), upto);
    }
    if (artifact.fusion)
        return artifact.fusion->predict(data, artifact.gbm ? &*artifact.gbm : nullptr);
    if (artifact.gbm) return artifact.gbm->predict_class(data.features_s());
    throw std::logic_error("artifact_predict: artifact holds no model");
}

double evaluate_artifact(const ModelArtifact& artifact, const Dataset& data, Metric metric) {
    const auto preds = artifact_predict(artifact, data);
    return metric_value(confusion_and_metrics(preds, data.labels(), data.num_classes), metric);
}

CompareReport run_compare(const ExperimentConfig& cfg, const Dataset& train, const Dataset& valid,
                          int repeats, const std::string& out_dir) {
    std::vector<std::string> roster;
    {
        std::stringstream ss(cfg.raw.get_str("compare.roster", "baseline,1wl_s,1wl_u,2wl,2wl2o,bfvdnn"));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) roster.push_back(tok);
        }
    }
    if (std::find(roster.begin(), roster.end(), "baseline") == roster.end())
        throw std::runtime_error("compare: roster must include the baseline row");
    if (repeats < 1) throw std::runtime_error("compare: repeats must be >= 1");

    CompareReport report;
    report.metric_name = to_string(cfg.metric);

    std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> traces;
    for (const auto& kind : roster) {
        if (std::find(kModelKinds.begin(), kModelKinds.end(), kind) == kModelKinds.end())
            throw std::runtime_error("compare: unknown roster entry '" + kind + "'");
        double sum = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
            ExperimentConfig entry = cfg;
            entry.model_kind = kind;
            entry.seed = mix_seed(cfg.seed, 0x77, static_cast<std::uint64_t>(rep));
            if (repeats == 1) entry.seed = cfg.seed;
            entry.raw.set("model.kind", kind);
            entry.raw.set("seed", std::to_string(entry.seed));
            const ModelArtifact artifact = train_model(entry, train, valid);
            sum += evaluate_artifact(artifact, valid, cfg.metric);
            if (rep == 0) {
                if (!out_dir.empty())
                    save_artifact(artifact, (std::filesystem::path(out_dir) / kind).string());
                const auto trace = artifact_trace(artifact);
                if (!trace.empty()) traces.emplace_back(kind, trace);
            }
        }
        CompareRow row;
        row.kind = kind;
        row.metric_value = sum / repeats;
        report.rows.push_back(row);
    }

    double baseline_value = 0.0;
    for (const auto& row : report.rows)
        if (row.kind == "baseline") baseline_value = row.metric_value;
    for (auto& row : report.rows)
        row.relative_improvement_pct = relative_improvement(row.metric_value, baseline_value);

    std::ostringstream table, csv;
    table << std::left << std::setw(12) << "model" << std::right << std::setw(12)
          << report.metric_name << std::setw(16) << "rel_impr_pct" << "\n";
    csv << "model," << report.metric_name << ",rel_impr_pct\n";
    table << std::fixed;
    for (const auto& row : report.rows) {
        table << std::left << std::setw(12) << row.kind << std::right << std::setw(12)
              << std::setprecision(4) << row.metric_value << std::setw(16) << std::setprecision(2)
              << row.relative_improvement_pct << "\n";
        csv << row.kind << ',' << std::setprecision(6) << row.metric_value << ','
            << std::setprecision(4) << row.relative_improvement_pct << "\n";
    }
    report.table_text = table.str();
    report.csv_text = csv.str();

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv_file(std::filesystem::path(out_dir) / "compare.csv");
        csv_file << report.csv_text;
        if (!traces.empty()) {
            std::ofstream svg(std::filesystem::path(out_dir) / "traces.svg");
            svg << render_traces_svg(traces);
        }
    }
    return report;
}

std::vector<std::pair<double, double>> artifact_trace(const ModelArtifact& artifact) {
    std::vector<std::pair<double, double>> trace;
    double minutes = 0.0;
    if (artifact.two_wl) {
        for (const auto& r : artifact.two_wl->history) {
            minutes += r.seconds / 60.0;
            trace.emplace_back(minutes, r.val_metric);
        }
    } else if (artifact.fusion) {
        for (const auto& r : artifact.fusion->history()) {
            minutes += r.seconds / 60.0;
            trace.emplace_back(minutes, r.val_metric);
        }
    }
    return trace;
}

std::string render_traces_svg(
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
    const int width = 720, height = 480, margin = 50;
    double x_max = 1e-9, y_min = 1.0, y_max = 0.0;
    for (const auto& [name, pts] : series)
        for (const auto& [x, y] : pts) {
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    if (y_max <= y_min) y_max = y_min + 1e-6;

    const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin
        << "' y2='" << height - margin << "' stroke='black'/>\n";
    svg << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << height - margin << "' stroke='black'/>\n";
    svg << "<text x='" << width / 2 << "' y='" << height - 12
        << "' text-anchor='middle' font-size='13'>minutes</text>\n";
    svg << "<text x='14' y='" << height / 2 << "' transform='rotate(-90 14 " << height / 2
        << ")' text-anchor='middle' font-size='13'>validation metric</text>\n";

    auto px = [&](double x) { return margin + (width - 2.0 * margin) * x / x_max; };
    auto py = [&](double y) {
        return height - margin - (height - 2.0 * margin) * (y - y_min) / (y_max - y_min);
    };
    int idx = 0;
    for (const auto& [name, pts] : series) {
        const char* color = colors[idx % 8];
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : pts) svg << px(x) << ',' << py(y) << ' ';
        svg << "'/>\n";
        svg << "<text x='" << width - margin + 4 << "' y='" << margin + 16 * idx
            << "' font-size='11' fill='" << color << "'>" << name << "</text>\n";
        ++idx;
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace duoboost
