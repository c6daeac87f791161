#include "duoboost/mcloss.hpp"

#include <cmath>
#include <stdexcept>

namespace duoboost {

namespace {

void check_dims(std::span<const double> scores, int label, const Codebook& codebook) {
    const int m = codebook.num_classes();
    if (static_cast<int>(scores.size()) != m)
        throw std::invalid_argument("mcloss: score length does not match class count");
    if (label < 0 || label >= m) throw std::invalid_argument("mcloss: label out of range");
    if (!all_finite(scores)) throw std::invalid_argument("mcloss: non-finite scores");
}

} // namespace

double loss(std::span<const double> scores, int label, const Codebook& codebook) {
    check_dims(scores, label, codebook);
    // <f, y - y^k> = f[label] - f[k] for unit codewords
    double sum = 0.0;
    for (int k = 0; k < codebook.num_classes(); ++k)
        sum += std::exp(0.5 * (scores[k] - scores[label]));
    return sum;
}

RiskReport risk(const Matrix& scores, const std::vector<int>& labels, const Codebook& codebook) {
    if (scores.rows() != labels.size())
        throw std::invalid_argument("risk: score/label count mismatch");
    if (labels.empty()) throw std::invalid_argument("risk: empty input");
    RiskReport report;
    for (std::size_t i = 0; i < labels.size(); ++i)
        report.total_risk += loss(scores.row(i), labels[i], codebook);
    report.mean_loss = report.total_risk / static_cast<double>(labels.size());
    return report;
}

Vec first_order_residual(std::span<const double> scores, int label, const Codebook& codebook) {
    check_dims(scores, label, codebook);
    const int m = codebook.num_classes();
    // exponent of term k: 1/2 (f[k] - f[label]); factor out the max
    double shift = 0.0;
    for (int k = 0; k < m; ++k) shift = std::max(shift, 0.5 * (scores[k] - scores[label]));
    const double scale = 0.5 * std::exp(shift);

    Vec w(m, 0.0);
    double own = 0.0;
    for (int k = 0; k < m; ++k) {
        if (k == label) continue;
        const double e = std::exp(0.5 * (scores[k] - scores[label]) - shift);
        w[k] = -scale * e;
        own += e;
    }
    w[label] = scale * own;
    return w;
}

Vec second_order_residual(std::span<const double> scores, int label, const Codebook& codebook) {
    check_dims(scores, label, codebook);
    const int m = codebook.num_classes();
    // exponent of term k: 1/4 (f[k] - f[label])
    double shift = 0.0;
    for (int k = 0; k < m; ++k) shift = std::max(shift, 0.25 * (scores[k] - scores[label]));
    const double scale = std::exp(shift);

    Vec wt(m, 0.0);
    double own = 0.0;
    for (int k = 0; k < m; ++k) {
        if (k == label) continue;
        const double e = std::exp(0.25 * (scores[k] - scores[label]) - shift);
        wt[k] = -scale * e;
        own += e;
    }
    wt[label] = scale * own;
    return wt;
}

double curvature_scalar(std::span<const double> scores, int label, const Codebook& codebook) {
    check_dims(scores, label, codebook);
    const int m = codebook.num_classes();
    double shift = 0.0;
    for (int k = 0; k < m; ++k) shift = std::max(shift, 0.5 * (scores[k] - scores[label]));
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
        if (k == label) continue;
        // ||y - y^k||^2 = 2 for unit codewords
        sum += 2.0 * std::exp(0.5 * (scores[k] - scores[label]) - shift);
    }
    return std::exp(shift) * sum;
}

PseudoResiduals compute_residuals(const Matrix& scores, const std::vector<int>& labels,
                                  const Codebook& codebook, bool with_second_order) {
    if (scores.rows() != labels.size())
        throw std::invalid_argument("compute_residuals: score/label count mismatch");
    const std::size_t n = labels.size();
    const int m = codebook.num_classes();

    PseudoResiduals r;
    r.first_order = Matrix(n, m);
    if (with_second_order) {
        r.second_order = Matrix(n, m);
        r.curvature.assign(n, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Vec w = first_order_residual(scores.row(i), labels[i], codebook);
        for (int c = 0; c < m; ++c) r.first_order(i, c) = w[c];
        if (with_second_order) {
            const Vec wt = second_order_residual(scores.row(i), labels[i], codebook);
            for (int c = 0; c < m; ++c) r.second_order(i, c) = wt[c];
            r.curvature[i] = curvature_scalar(scores.row(i), labels[i], codebook);
        }
    }
    return r;
}

double first_order_decrease(const Matrix& learner_outputs, const Matrix& residuals) {
    if (learner_outputs.rows() != residuals.rows() || learner_outputs.cols() != residuals.cols())
        throw std::invalid_argument("first_order_decrease: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < learner_outputs.rows(); ++i)
        sum += dot(learner_outputs.row(i), residuals.row(i));
    return sum;
}

double risk_quadratic_surrogate(const Matrix& g_outputs, const Matrix& h_outputs,
                                const PseudoResiduals& residuals, double base_risk,
                                double eps, double delta) {
    const std::size_t n = residuals.first_order.rows();
    if (g_outputs.rows() != n || h_outputs.rows() != n)
        throw std::invalid_argument("risk_quadratic_surrogate: sample count mismatch");
    if (residuals.second_order.rows() != n || residuals.curvature.size() != n)
        throw std::invalid_argument("risk_quadratic_surrogate: second-order residuals missing");

    double s_g = 0.0, s_h = 0.0, q_g = 0.0, q_h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto g = g_outputs.row(i);
        const auto h = h_outputs.row(i);
        const auto w = residuals.first_order.row(i);
        const auto wt = residuals.second_order.row(i);
        s_g += dot(g, w);
        s_h += dot(h, w);
        q_g += dot(g, g) + 2.0 * dot(g, wt) + residuals.curvature[i];
        q_h += dot(h, h) + 2.0 * dot(h, wt) + residuals.curvature[i];
    }
    return base_risk - eps * s_g - delta * s_h
         + 0.5 * eps * eps * 0.25 * q_g
         + 0.5 * delta * delta * 0.25 * q_h
         + 0.5 * eps * delta * (s_g + s_h);
}

} // namespace duoboost
