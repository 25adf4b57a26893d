#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crashsev/core.hpp"

namespace crashsev {

struct ConfusionCounts {
    std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
    std::int64_t total() const { return tp + tn + fp + fn; }
};

ConfusionCounts confusion_counts(std::span<const int> y_true,
                                 std::span<const int> y_pred);

// A metric whose denominator is zero stays unset; it is never coerced to 0.
struct MetricsReport {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> auc;
};

/// accuracy/precision/recall/f1 from confusion counts (auc left unset).
MetricsReport score_set(const ConfusionCounts& c);

struct RocCurve {
    std::vector<double> fpr;         // non-decreasing, starts 0, ends 1
    std::vector<double> tpr;         // non-decreasing, starts 0, ends 1
    std::vector<double> thresholds;  // +inf then distinct scores, descending
};

/// Threshold sweep with "predict 1 iff score >= t"; tied scores share a point.
RocCurve roc_curve(std::span<const int> y_true, std::span<const double> scores);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

void write_roc_csv(const std::string& path, const RocCurve& curve);

/// "undefined" for unset metrics, full precision otherwise.
std::string format_metric(const std::optional<double>& metric);

}  // namespace crashsev
