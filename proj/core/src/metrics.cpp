#include "duoboost/metrics.hpp"

#include <stdexcept>

namespace duoboost {

Metric metric_from_string(const std::string& name) {
    if (name == "f1") return Metric::f1;
    if (name == "accuracy") return Metric::accuracy;
    throw std::invalid_argument("unknown metric: " + name);
}

std::string to_string(Metric m) {
    return m == Metric::f1 ? "f1" : "accuracy";
}

namespace {

// F1 of one class from its confusion-matrix margins; 0 when undefined.
double class_f1(double tp, double fp, double fn) {
    const double denom = 2.0 * tp + fp + fn;
    if (denom <= 0.0) return 0.0;
    return 2.0 * tp / denom;
}

} // namespace

MetricReport confusion_and_metrics(const std::vector<int>& predictions,
                                   const std::vector<int>& labels,
                                   int num_classes) {
    if (predictions.empty()) throw std::invalid_argument("confusion_and_metrics: empty input");
    if (predictions.size() != labels.size())
        throw std::invalid_argument("confusion_and_metrics: prediction/label length mismatch");

    MetricReport report;
    report.confusion = Matrix(num_classes, num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes || predictions[i] < 0 || predictions[i] >= num_classes)
            throw std::invalid_argument("confusion_and_metrics: class index out of range");
        report.confusion(labels[i], predictions[i]) += 1.0;
    }

    double trace = 0.0;
    for (int k = 0; k < num_classes; ++k) trace += report.confusion(k, k);
    report.accuracy = trace / static_cast<double>(labels.size());

    auto margins = [&](int k, double& tp, double& fp, double& fn) {
        tp = report.confusion(k, k);
        fp = fn = 0.0;
        for (int j = 0; j < num_classes; ++j) {
            if (j == k) continue;
            fp += report.confusion(j, k);
            fn += report.confusion(k, j);
        }
    };

    if (num_classes == 2) {
        // binary F1, class 1 positive
        double tp, fp, fn;
        margins(1, tp, fp, fn);
        report.f1 = class_f1(tp, fp, fn);
    } else {
        double sum = 0.0;
        for (int k = 0; k < num_classes; ++k) {
            double tp, fp, fn;
            margins(k, tp, fp, fn);
            sum += class_f1(tp, fp, fn);
        }
        report.f1 = sum / num_classes;
    }
    return report;
}

double metric_value(const MetricReport& report, Metric metric) {
    return metric == Metric::f1 ? report.f1 : report.accuracy;
}

double relative_improvement(double metric_model, double metric_baseline) {
    if (metric_baseline <= 0.0)
        throw std::domain_error("relative_improvement: baseline must be positive");
    return 100.0 * (metric_model - metric_baseline) / metric_baseline;
}

} // namespace duoboost
