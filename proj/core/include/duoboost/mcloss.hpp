#pragma once

#include <vector>

#include "duoboost/types.hpp"

namespace duoboost {

/// Per-sample regression targets and curvature terms derived from the
/// multi-class exponential loss at the current predictor scores.
struct PseudoResiduals {
    Matrix first_order;   // n x M: negative risk gradient direction per sample
    Matrix second_order;  // n x M: curvature cross term (empty unless requested)
    Vec curvature;        // n: learner-independent curvature mass (empty unless requested)
};

struct RiskReport {
    double total_risk = 0.0;  // sum over samples
    double mean_loss = 0.0;   // total / n
};

/// Multi-class exponential loss: sum_k exp(-1/2 <f, y - y^k>). Always >= 1
/// because the own-class term contributes exp(0).
double loss(std::span<const double> scores, int label, const Codebook& codebook);

/// Empirical risk: total = sum of per-sample losses, mean reported alongside.
RiskReport risk(const Matrix& scores, const std::vector<int>& labels, const Codebook& codebook);

/// First-order residual vector for one sample:
/// 1/2 e^{-1/2<f,y>} sum_k (y - y^k) e^{1/2<f,y^k>}.
/// Exponents are evaluated max-shifted so large scores do not produce
/// inf - inf artifacts.
Vec first_order_residual(std::span<const double> scores, int label, const Codebook& codebook);

/// Curvature cross term for one sample: sum_k (y - y^k) e^{-1/4<f, y - y^k>}.
Vec second_order_residual(std::span<const double> scores, int label, const Codebook& codebook);

/// Learner-independent curvature scalar:
/// e^{-1/2<f,y>} sum_k ||y - y^k||^2 e^{1/2<f,y^k>}. Equals 2(M-1) at f = 0.
double curvature_scalar(std::span<const double> scores, int label, const Codebook& codebook);

/// Batch evaluation of the residual terms at the given scores.
PseudoResiduals compute_residuals(const Matrix& scores, const std::vector<int>& labels,
                                  const Codebook& codebook, bool with_second_order);

/// Negated directional derivative of the risk along a learner:
/// sum_i <outputs_i, residual_i>.
double first_order_decrease(const Matrix& learner_outputs, const Matrix& residuals);

/// Quadratic risk expansion around the current predictor, as a function of
/// the two step sizes:
///   base - eps*S_g - delta*S_h
///   + eps^2/2 * 1/4 sum(<g,g> + 2<g,w~> + w^)
///   + delta^2/2 * 1/4 sum(<h,h> + 2<h,w~> + w^)
///   + eps*delta/2 * (S_g + S_h),    S_g = sum<g,w>, S_h = sum<h,w>.
double risk_quadratic_surrogate(const Matrix& g_outputs, const Matrix& h_outputs,
                                const PseudoResiduals& residuals, double base_risk,
                                double eps, double delta);

} // namespace duoboost
