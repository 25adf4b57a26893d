#include "crashsev/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "crashsev/csv.hpp"

namespace crashsev {

ConfusionCounts confusion_counts(std::span<const int> y_true,
                                 std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw DataError("confusion_counts: length mismatch (" +
                        std::to_string(y_true.size()) + " vs " +
                        std::to_string(y_pred.size()) + ")");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i], p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
            throw DataError("confusion_counts: non-binary value at index " +
                            std::to_string(i));
        }
        if (t == 1 && p == 1) ++c.tp;
        else if (t == 0 && p == 0) ++c.tn;
        else if (t == 0 && p == 1) ++c.fp;
        else ++c.fn;
    }
    return c;
}

MetricsReport score_set(const ConfusionCounts& c) {
    if (c.total() == 0) throw DataError("score_set: no evaluated rows");
    MetricsReport r;
    r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    if (c.tp + c.fp > 0) {
        r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    }
    if (c.tp + c.fn > 0) {
        r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    if (r.precision && r.recall && (*r.precision + *r.recall) > 0.0) {
        r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    }
    return r;
}

RocCurve roc_curve(std::span<const int> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) {
        throw DataError("roc_curve: length mismatch");
    }
    std::int64_t p_count = 0, n_count = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] != 0 && y_true[i] != 1) {
            throw DataError("roc_curve: non-binary label");
        }
        if (!std::isfinite(scores[i])) throw DataError("roc_curve: non-finite score");
        y_true[i] == 1 ? ++p_count : ++n_count;
    }
    if (p_count == 0 || n_count == 0) {
        throw DataError("roc_curve: both classes must be present");
    }

    std::vector<std::size_t> order(y_true.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    curve.thresholds.push_back(std::numeric_limits<double>::infinity());
    curve.fpr.push_back(0.0);
    curve.tpr.push_back(0.0);

    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double t = scores[order[i]];
        // Consume the whole tie group: one curve point per distinct score.
        while (i < order.size() && scores[order[i]] == t) {
            y_true[order[i]] == 1 ? ++tp : ++fp;
            ++i;
        }
        curve.thresholds.push_back(t);
        curve.fpr.push_back(static_cast<double>(fp) / static_cast<double>(n_count));
        curve.tpr.push_back(static_cast<double>(tp) / static_cast<double>(p_count));
    }
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.fpr.size(); ++i) {
        area += (curve.fpr[i] - curve.fpr[i - 1]) *
                (curve.tpr[i] + curve.tpr[i - 1]) * 0.5;
    }
    return area;
}

void write_roc_csv(const std::string& path, const RocCurve& curve) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < curve.fpr.size(); ++i) {
        if (std::isinf(curve.thresholds[i])) out << "inf";
        else out << csv::format_double(curve.thresholds[i]);
        out << ',' << csv::format_double(curve.fpr[i]) << ','
            << csv::format_double(curve.tpr[i]) << '\n';
    }
}

std::string format_metric(const std::optional<double>& metric) {
    return metric ? csv::format_double(*metric) : "undefined";
}

}  // namespace crashsev
