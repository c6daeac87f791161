#pragma once

#include <string>
#include <vector>

#include "duoboost/matrix.hpp"

namespace duoboost {

enum class Metric { f1, accuracy };

Metric metric_from_string(const std::string& name);
std::string to_string(Metric m);

struct MetricReport {
    Matrix confusion;      // rows: true label, cols: predicted label
    double accuracy = 0.0;
    double f1 = 0.0;       // binary F1 (class 1 positive) when M == 2, macro F1 otherwise
};

/// Confusion matrix plus accuracy and F1. Throws on empty input or
/// mismatched list lengths.
MetricReport confusion_and_metrics(const std::vector<int>& predictions,
                                   const std::vector<int>& labels,
                                   int num_classes);

double metric_value(const MetricReport& report, Metric metric);

/// 100 * (model - baseline) / baseline. Baseline must be positive.
double relative_improvement(double metric_model, double metric_baseline);

} // namespace duoboost
