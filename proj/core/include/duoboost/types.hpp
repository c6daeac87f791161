#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "duoboost/matrix.hpp"

namespace duoboost {

/// Unit-vector class codebook: codeword k is the k-th unit vector in R^M,
/// so pairwise squared codeword distance is 2 for distinct classes.
class Codebook {
public:
    explicit Codebook(int num_classes);

    int num_classes() const { return num_classes_; }
    const Vec& codeword(int k) const;

private:
    int num_classes_ = 2;
    std::vector<Vec> codewords_;
};

/// One training example: two dense feature vectors plus a class label.
struct BimodalSample {
    Vec x_u;   // unstructured modality
    Vec x_s;   // structured modality
    int label = 0;
};

struct Dataset {
    std::vector<BimodalSample> samples;
    int num_classes = 0;
    int dim_u = 0;
    int dim_s = 0;
    std::uint64_t seed = 0;
    // Generator bookkeeping (column assignments, noise flip counts, ...).
    // In-memory only; the on-disk format carries header + samples.
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return samples.size(); }
    Matrix features_u() const;
    Matrix features_s() const;
    std::vector<int> labels() const;

    /// Checks label range and uniform dimensions; throws std::invalid_argument.
    void validate() const;
};

/// argmax_k <y^k, scores>; ties broken by lowest class index.
int classify(std::span<const double> scores, const Codebook& codebook);

std::vector<int> classify_rows(const Matrix& scores, const Codebook& codebook);

} // namespace duoboost
