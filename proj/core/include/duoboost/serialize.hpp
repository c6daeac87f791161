#pragma once

#include <optional>
#include <string>

#include "duoboost/boosting.hpp"
#include "duoboost/config.hpp"
#include "duoboost/fusion.hpp"
#include "duoboost/gbm.hpp"

namespace duoboost {

inline constexpr const char* kModelSchema = "duoboost-model-v1";

/// A trained model plus the configuration that produced it. Exactly one of
/// the model slots is populated for single-model kinds; bfvdnn carries both
/// the GBM and the fusion net.
struct ModelArtifact {
    std::string kind;                        // baseline | bfvdnn | 2wl | ... | gbm_only
    std::optional<TwoLearnerModel> two_wl;
    std::optional<GbmModel> gbm;
    std::optional<FusionModel> fusion;
    KeyValueConfig config_echo;
};

// JSON text forms (deterministic: sorted keys, shortest round-trip floats).
std::string to_json_string(const RegressionTree& tree);
RegressionTree tree_from_json_string(const std::string& text);
std::string to_json_string(const Mlp& mlp);
Mlp mlp_from_json_string(const std::string& text);
std::string model_json(const ModelArtifact& artifact);
ModelArtifact model_from_json(const std::string& text);

/// Artifact directory layout:
///   model.json     serialized model (byte-identical given seed + config)
///   config.txt     canonical echo of the training configuration
///   manifest.txt   schema, kind, seed, config hash (no timestamps)
///   history.csv    per-iteration/epoch training history, when the model has one
void save_artifact(const ModelArtifact& artifact, const std::string& dir);
ModelArtifact load_artifact(const std::string& dir);

} // namespace duoboost
