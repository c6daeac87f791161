#include "duoboost/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace duoboost {

using json = nlohmann::json;

namespace {

json node_to_json(const std::vector<TreeNode>& nodes, int id) {
    const TreeNode& n = nodes[id];
    if (n.is_leaf()) return json{{"leaf", n.value}};
    return json{{"split", {{"feature", n.feature}, {"threshold", n.threshold}, {"gain", n.gain}}},
                {"left", node_to_json(nodes, n.left)},
                {"right", node_to_json(nodes, n.right)}};
}

int node_from_json(const json& j, std::vector<TreeNode>& nodes) {
    TreeNode n;
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(n);
    if (j.contains("leaf")) {
        nodes[id].value = j.at("leaf").get<Vec>();
        return id;
    }
    const json& s = j.at("split");
    nodes[id].feature = s.at("feature").get<int>();
    nodes[id].threshold = s.at("threshold").get<double>();
    nodes[id].gain = s.at("gain").get<double>();
    const int left = node_from_json(j.at("left"), nodes);
    const int right = node_from_json(j.at("right"), nodes);
    nodes[id].left = left;
    nodes[id].right = right;
    return id;
}

json tree_to_json(const RegressionTree& tree) {
    return json{{"input_dim", tree.input_dim()}, {"root", node_to_json(tree.nodes(), 0)}};
}

RegressionTree tree_from_json(const json& j) {
    std::vector<TreeNode> nodes;
    node_from_json(j.at("root"), nodes);
    return RegressionTree(std::move(nodes), j.at("input_dim").get<int>());
}

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const Vec data = j.at("data").get<Vec>();
    if (data.size() != m.data().size())
        throw std::runtime_error("model load error: matrix payload size mismatch");
    m.data() = data;
    return m;
}

json layers_to_json(const std::vector<DenseLayer>& layers) {
    json arr = json::array();
    for (const auto& l : layers)
        arr.push_back(json{{"weights", matrix_to_json(l.weights)}, {"bias", l.bias}});
    return arr;
}

std::vector<DenseLayer> layers_from_json(const json& arr) {
    std::vector<DenseLayer> layers;
    for (const auto& j : arr) {
        DenseLayer l;
        l.weights = matrix_from_json(j.at("weights"));
        l.bias = j.at("bias").get<Vec>();
        if (l.bias.size() != l.weights.rows())
            throw std::runtime_error("model load error: layer bias/weight shape mismatch");
        layers.push_back(std::move(l));
    }
    return layers;
}

json mlp_to_json(const Mlp& mlp) { return json{{"layers", layers_to_json(mlp.layers())}}; }

Mlp mlp_from_json(const json& j) { return Mlp(layers_from_json(j.at("layers"))); }

json gbm_to_json(const GbmModel& gbm) {
    json stages = json::array();
    for (const auto& stage : gbm.stages()) {
        json trees = json::array();
        for (const auto& t : stage) trees.push_back(tree_to_json(t));
        stages.push_back(std::move(trees));
    }
    return json{{"num_classes", gbm.num_classes()},
                {"learning_rate", gbm.learning_rate()},
                {"max_depth", gbm.params().max_depth},
                {"min_samples_leaf", gbm.params().min_samples_leaf},
                {"init_scores", gbm.init_scores()},
                {"stages", std::move(stages)}};
}

GbmModel gbm_from_json(const json& j) {
    GbmParams params;
    params.learning_rate = j.at("learning_rate").get<double>();
    params.max_depth = j.at("max_depth").get<int>();
    params.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    std::vector<std::vector<RegressionTree>> stages;
    for (const auto& stage : j.at("stages")) {
        std::vector<RegressionTree> trees;
        for (const auto& t : stage) trees.push_back(tree_from_json(t));
        stages.push_back(std::move(trees));
    }
    params.num_stages = static_cast<int>(stages.size());
    return GbmModel(j.at("num_classes").get<int>(), params, j.at("init_scores").get<Vec>(),
                    std::move(stages));
}

json two_wl_to_json(const TwoLearnerModel& model) {
    json stages = json::array();
    for (const auto& s : model.stages) {
        json stage{{"eps", s.eps}, {"delta", s.delta}};
        if (s.g) stage["g"] = mlp_to_json(*s.g);
        if (s.h) stage["h"] = tree_to_json(*s.h);
        stages.push_back(std::move(stage));
    }
    return json{{"num_classes", model.num_classes},
                {"mode", to_string(model.mode)},
                {"best_iteration", model.best_iteration},
                {"stages", std::move(stages)}};
}

TwoLearnerModel two_wl_from_json(const json& j) {
    TwoLearnerModel model;
    model.num_classes = j.at("num_classes").get<int>();
    model.mode = two_learner_mode_from_string(j.at("mode").get<std::string>());
    model.best_iteration = j.at("best_iteration").get<int>();
    for (const auto& s : j.at("stages")) {
        StagePair stage;
        stage.eps = s.at("eps").get<double>();
        stage.delta = s.at("delta").get<double>();
        if (s.contains("g")) stage.g = mlp_from_json(s.at("g"));
        if (s.contains("h")) stage.h = tree_from_json(s.at("h"));
        if (!stage.g && !stage.h)
            throw std::runtime_error("model load error: stage with no learner");
        model.stages.push_back(std::move(stage));
    }
    return model;
}

json fusion_to_json(const FusionModel& model) {
    json j{{"num_classes", model.num_classes()},
           {"fusion", to_string(model.fusion())},
           {"variant", to_string(model.variant())},
           {"branch_u", layers_to_json(model.branch_u_layers())},
           {"branch_2", layers_to_json(model.branch_2_layers())},
           {"head", layers_to_json(model.head_layers())}};
    if (!model.bfv_standardizer().empty())
        j["bfv_standardizer"] = json{{"mean", model.bfv_standardizer().mean},
                                     {"stddev", model.bfv_standardizer().stddev}};
    return j;
}

FusionModel fusion_from_json(const json& j) {
    Standardizer std2;
    if (j.contains("bfv_standardizer")) {
        std2.mean = j.at("bfv_standardizer").at("mean").get<Vec>();
        std2.stddev = j.at("bfv_standardizer").at("stddev").get<Vec>();
    }
    return FusionModel(j.at("num_classes").get<int>(),
                       fusion_kind_from_string(j.at("fusion").get<std::string>()),
                       fusion_variant_from_string(j.at("variant").get<std::string>()),
                       layers_from_json(j.at("branch_u")), layers_from_json(j.at("branch_2")),
                       layers_from_json(j.at("head")), std::move(std2));
}

} // namespace

std::string to_json_string(const RegressionTree& tree) { return tree_to_json(tree).dump(); }

RegressionTree tree_from_json_string(const std::string& text) {
    return tree_from_json(json::parse(text));
}

std::string to_json_string(const Mlp& mlp) { return mlp_to_json(mlp).dump(); }

Mlp mlp_from_json_string(const std::string& text) { return mlp_from_json(json::parse(text)); }

std::string model_json(const ModelArtifact& artifact) {
    json j{{"schema", kModelSchema}, {"kind", artifact.kind}};
    if (artifact.two_wl) j["two_wl"] = two_wl_to_json(*artifact.two_wl);
    if (artifact.gbm) j["gbm"] = gbm_to_json(*artifact.gbm);
    if (artifact.fusion) j["fusion"] = fusion_to_json(*artifact.fusion);
    return j.dump(2);
}

ModelArtifact model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model load error: ") + e.what());
    }
    try {
        const std::string schema = j.at("schema").get<std::string>();
        if (schema != kModelSchema)
            throw std::runtime_error("model load error: unsupported schema '" + schema +
                                     "' (expected " + std::string(kModelSchema) + ")");
        ModelArtifact artifact;
        artifact.kind = j.at("kind").get<std::string>();
        if (j.contains("two_wl")) artifact.two_wl = two_wl_from_json(j.at("two_wl"));
        if (j.contains("gbm")) artifact.gbm = gbm_from_json(j.at("gbm"));
        if (j.contains("fusion")) artifact.fusion = fusion_from_json(j.at("fusion"));
        return artifact;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model load error: ") + e.what());
    }
}

void save_artifact(const ModelArtifact& artifact, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream file(fs::path(dir) / name, std::ios::binary);
        if (!file) throw std::runtime_error("save_artifact: cannot write " + name + " in " + dir);
        file << content;
    };
    write("model.json", model_json(artifact));
    write("config.txt", artifact.config_echo.canonical_text());
    std::string manifest;
    manifest += "schema=" + std::string(kModelSchema) + "\n";
    manifest += "kind=" + artifact.kind + "\n";
    manifest += "seed=" + artifact.config_echo.get_str("seed", "0") + "\n";
    manifest += "config_hash=" + artifact.config_echo.hash() + "\n";
    write("manifest.txt", manifest);

    // trainer history, when present (seconds vary run to run; kept out of model.json)
    std::ostringstream history;
    history << std::setprecision(12);
    if (artifact.two_wl && !artifact.two_wl->history.empty()) {
        const bool second_order = artifact.two_wl->history.front().inner_j >= 0;
        history << "iter,risk,eps,delta,seconds,val_metric";
        if (second_order) history << ",inner_j";
        history << "\n";
        for (const auto& r : artifact.two_wl->history) {
            history << r.iter << ',' << r.risk << ',' << r.eps << ',' << r.delta << ','
                    << r.seconds << ',' << r.val_metric;
            if (second_order) history << ',' << r.inner_j;
            history << "\n";
        }
    } else if (artifact.fusion && !artifact.fusion->history().empty()) {
        history << "epoch,train_loss,val_metric,seconds\n";
        for (const auto& r : artifact.fusion->history())
            history << r.epoch << ',' << r.train_loss << ',' << r.val_metric << ',' << r.seconds
                    << "\n";
    }
    if (!history.str().empty()) write("history.csv", history.str());
}

ModelArtifact load_artifact(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path model_path = fs::path(dir) / "model.json";
    std::ifstream file(model_path, std::ios::binary);
    if (!file) throw std::runtime_error("load_artifact: cannot open " + model_path.string());
    std::stringstream ss;
    ss << file.rdbuf();
    ModelArtifact artifact = model_from_json(ss.str());
    const fs::path config_path = fs::path(dir) / "config.txt";
    if (fs::exists(config_path)) artifact.config_echo = KeyValueConfig::parse_file(config_path.string());
    return artifact;
}

} // namespace duoboost
