#include "duoboost/types.hpp"

#include <stdexcept>
#include <string>

namespace duoboost {

Codebook::Codebook(int num_classes) : num_classes_(num_classes) {
    if (num_classes < 2) throw std::invalid_argument("Codebook: need at least 2 classes");
    codewords_.resize(num_classes);
    for (int k = 0; k < num_classes; ++k) {
        codewords_[k].assign(num_classes, 0.0);
        codewords_[k][k] = 1.0;
    }
}

const Vec& Codebook::codeword(int k) const {
    if (k < 0 || k >= num_classes_) throw std::invalid_argument("Codebook: class index out of range");
    return codewords_[k];
}

Matrix Dataset::features_u() const {
    Matrix m(samples.size(), dim_u);
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (int j = 0; j < dim_u; ++j) m(i, j) = samples[i].x_u[j];
    return m;
}

Matrix Dataset::features_s() const {
    Matrix m(samples.size(), dim_s);
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (int j = 0; j < dim_s; ++j) m(i, j) = samples[i].x_s[j];
    return m;
}

std::vector<int> Dataset::labels() const {
    std::vector<int> y(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) y[i] = samples[i].label;
    return y;
}

void Dataset::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.label < 0 || s.label >= num_classes)
            throw std::invalid_argument("Dataset: label out of range at sample " + std::to_string(i));
        if (static_cast<int>(s.x_u.size()) != dim_u || static_cast<int>(s.x_s.size()) != dim_s)
            throw std::invalid_argument("Dataset: dimension mismatch at sample " + std::to_string(i));
        if (!all_finite(s.x_u) || !all_finite(s.x_s))
            throw std::invalid_argument("Dataset: non-finite feature at sample " + std::to_string(i));
    }
}

int classify(std::span<const double> scores, const Codebook& codebook) {
    const int m = codebook.num_classes();
    if (static_cast<int>(scores.size()) != m)
        throw std::invalid_argument("classify: score length does not match class count");
    int best = 0;
    double best_score = dot(codebook.codeword(0), scores);
    for (int k = 1; k < m; ++k) {
        const double s = dot(codebook.codeword(k), scores);
        if (s > best_score) {
            best_score = s;
            best = k;
        }
    }
    return best;
}

std::vector<int> classify_rows(const Matrix& scores, const Codebook& codebook) {
    std::vector<int> out(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) out[i] = classify(scores.row(i), codebook);
    return out;
}

} // namespace duoboost
