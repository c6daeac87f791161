#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "duoboost/harness.hpp"

namespace duoboost {

namespace {

namespace fs = std::filesystem;

int run_gen_data(const std::string& spec_path, const std::string& out_dir) {
    const auto cfg = ExperimentConfig::from(KeyValueConfig::parse_file(spec_path));
    const GeneratedPair pair = generate(cfg.gen_spec());
    fs::create_directories(out_dir);
    const auto train_path = (fs::path(out_dir) / "train.ds").string();
    const auto valid_path = (fs::path(out_dir) / "valid.ds").string();
    save_dataset(pair.train, train_path);
    save_dataset(pair.valid, valid_path);
    std::cout << "wrote " << train_path << " (" << pair.train.size() << " samples) and "
              << valid_path << " (" << pair.valid.size() << " samples)\n";
    for (const auto& [k, v] : pair.train.metadata) std::cout << "train." << k << "=" << v << "\n";
    return 0;
}

void write_history_plot(const ModelArtifact& artifact, const std::string& out_dir) {
    const auto trace = artifact_trace(artifact);
    if (trace.empty()) return;
    std::ofstream svg(fs::path(out_dir) / "trace.svg");
    svg << render_traces_svg({{artifact.kind, trace}});
}

int run_train(const std::string& config_path, const std::string& out_dir, bool plot) {
    const auto cfg = ExperimentConfig::from(KeyValueConfig::parse_file(config_path));
    const GeneratedPair data = resolve_datasets(cfg);
    const ModelArtifact artifact = train_model(cfg, data.train, data.valid);
    save_artifact(artifact, out_dir);
    if (plot) write_history_plot(artifact, out_dir);
    if (!data.valid.samples.empty()) {
        const double value = evaluate_artifact(artifact, data.valid, cfg.metric);
        std::cout << "trained " << artifact.kind << "; validation " << to_string(cfg.metric) << "="
                  << value << "\n";
    } else {
        std::cout << "trained " << artifact.kind << "\n";
    }
    std::cout << "artifact written to " << out_dir << "\n";
    return 0;
}

int run_eval(const std::string& model_dir, const std::string& data_path,
             const std::string& metric_override) {
    const ModelArtifact artifact = load_artifact(model_dir);
    const Dataset data = load_dataset(data_path);
    const Metric metric = metric_override.empty()
                              ? metric_from_string(artifact.config_echo.get_str("metric", "f1"))
                              : metric_from_string(metric_override);
    const double value = evaluate_artifact(artifact, data, metric);
    std::cout << "metric=" << to_string(metric) << " value=" << value << "\n";
    return 0;
}

int run_compare_cmd(const std::string& config_path, const std::string& out_dir, int repeats,
                    bool plot) {
    auto cfg = ExperimentConfig::from(KeyValueConfig::parse_file(config_path));
    const GeneratedPair data = resolve_datasets(cfg);
    if (repeats <= 0) repeats = cfg.raw.get_int("compare.repeats", 1);
    const CompareReport report = run_compare(cfg, data.train, data.valid, repeats, out_dir);
    std::cout << report.table_text;
    if (!out_dir.empty()) std::cout << "details written to " << out_dir << "\n";
    (void)plot;  // traces.svg is emitted by run_compare when artifacts exist
    return 0;
}

} // namespace

int cli_run(int argc, const char* const* argv) {
    CLI::App app{"bimodal boosted/fused classifier toolkit"};
    app.require_subcommand(1);

    std::string spec_path, config_path, out_dir, model_dir, data_path, metric_override;
    int repeats = 0;
    bool plot = false;

    auto* gen = app.add_subcommand("gen-data", "generate a synthetic bimodal dataset pair");
    gen->add_option("--spec", spec_path, "generation spec (key=value file)")->required();
    gen->add_option("--out", out_dir, "output directory for train.ds/valid.ds")->required();

    auto* train = app.add_subcommand("train", "train one model and write its artifact");
    train->add_option("--config", config_path, "experiment config (key=value file)")->required();
    train->add_option("--out", out_dir, "artifact output directory")->required();
    train->add_flag("--plot", plot, "write an SVG metric-vs-minutes trace");

    auto* eval = app.add_subcommand("eval", "evaluate a stored model on a dataset");
    eval->add_option("--model", model_dir, "artifact directory")->required();
    eval->add_option("--data", data_path, "dataset file")->required();
    eval->add_option("--metric", metric_override, "f1 or accuracy (default: training config)");

    auto* compare = app.add_subcommand("compare", "train a roster and tabulate improvements");
    compare->add_option("--config", config_path, "experiment config (key=value file)")->required();
    compare->add_option("--out", out_dir, "output directory for artifacts and compare.csv");
    compare->add_option("--repeats", repeats, "repeat runs per entry, mean reported");
    compare->add_flag("--plot", plot, "write an SVG metric-vs-minutes trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return app.exit(e, std::cerr, std::cerr);
    }

    try {
        if (gen->parsed()) return run_gen_data(spec_path, out_dir);
        if (train->parsed()) return run_train(config_path, out_dir, plot);
        if (eval->parsed()) return run_eval(model_dir, data_path, metric_override);
        if (compare->parsed()) return run_compare_cmd(config_path, out_dir, repeats, plot);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace duoboost
