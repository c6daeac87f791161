#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "duoboost/gbm.hpp"
#include "duoboost/types.hpp"

namespace duoboost {

enum class GenKind { split_tabular, linear_margin, shapes, xor_bimodal };

GenKind gen_kind_from_string(const std::string& name);
std::string to_string(GenKind k);

struct GenSpec {
    GenKind kind = GenKind::xor_bimodal;
    int n_train = 1000;
    int n_valid = 200;
    int dim_u = 8;
    int dim_s = 8;
    int num_classes = 2;
    double noise_rate = 0.09;
    std::uint64_t seed = 0;

    // linear_margin
    double class0_prior = 0.47;
    double blob_mean = 1.0;        // unstructured blob separation

    // shapes
    int image_side = 32;

    // xor_bimodal
    double bit_noise = 0.3;        // blob noise on the latent-bit coordinate
    double leakage = 0.0;          // label correlation of the leakage coordinate

    // split_tabular
    bool importance_split = false;
    int total_columns = 8;
    int informative_columns = 3;
    std::string csv_path;          // optional external tabular data
    GbmParams split_gbm{20, 0.1, 3, 1};
};

struct GeneratedPair {
    Dataset train;
    Dataset valid;
};

/// Generate train and validation splits per the spec. Pure function of the
/// spec (seed included): identical specs produce identical datasets.
GeneratedPair generate(const GenSpec& spec);

Dataset gen_linear_margin(const GenSpec& spec, int n, std::uint64_t seed);
Dataset gen_shapes(const GenSpec& spec, int n, std::uint64_t seed);
Dataset gen_xor_bimodal(const GenSpec& spec, int n, std::uint64_t seed);

/// Split tabular columns into the two modalities: random shuffle or
/// GBM-gain ranking (top half becomes the structured side). Column
/// assignments are recorded in the dataset metadata.
Dataset split_tabular(const Matrix& features, const std::vector<int>& labels,
                      bool importance_split, std::uint64_t split_seed, const GbmParams& gbm_params);

/// Flip each label with the given probability to a uniformly random
/// different class; returns the number of flips.
int apply_label_noise(std::vector<BimodalSample>& samples, double rate, int num_classes,
                      std::uint64_t seed);

/// Text format: header "M dim_u dim_s n", then one line per sample
/// (label, dim_u floats, dim_s floats), shortest round-trip decimals.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

/// CSV with a header row; the column named "label" holds integer classes,
/// every other column is a numeric feature.
void load_csv(const std::string& path, Matrix& features, std::vector<int>& labels);

} // namespace duoboost
