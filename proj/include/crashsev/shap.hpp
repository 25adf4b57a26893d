#pragma once

#include <string>
#include <vector>

#include "crashsev/models.hpp"

namespace crashsev {

/// Per-row, per-feature attributions of the model's additive score (the
/// margin for boosted ensembles, the probability elsewhere), against a fixed
/// background sample. Local accuracy: base_value + Σ_j values[i,j] equals the
/// explained score of row i.
struct ShapMatrix {
    Matrix values;  // n × p
    double base_value = 0.0;
    std::vector<std::string> column_names;
};

/// The score the explanations decompose (matches FittedModel::margin for
/// tree-based kinds, probability for logistic/svm).
double explain_score(const FittedModel& model, std::span<const double> row);

/// Exact Shapley values of v(S) = mean over background b of the score of the
/// hybrid row (S from `row`, rest from b), by full subset enumeration.
/// Requires p <= 20.
std::vector<double> shap_brute_force(const FittedModel& model,
                                     std::span<const double> row,
                                     const Matrix& background);

/// Same value function, computed by tree-path traversal in time polynomial in
/// tree size × background size. Tree-based models only.
std::vector<double> shap_tree(const FittedModel& model, std::span<const double> row,
                              const Matrix& background);

/// Explains each row of `rows`; picks shap_tree for tree-based models and
/// brute force otherwise.
ShapMatrix explain_rows(const FittedModel& model, const Matrix& rows,
                        const Matrix& background);

struct GlobalImportance {
    // (feature, mean |attribution|), sorted descending; ties by feature name.
    std::vector<std::pair<std::string, double>> entries;
};

GlobalImportance global_importance(const ShapMatrix& shap);

struct LocalSummaryRecord {
    std::size_t row = 0;
    std::string feature;
    double shap = 0.0;
    double norm_value = 0.0;  // distinct-value rank scaled to [0,1]; 0.5 if constant
};

/// Long-format beeswarm export: one record per (row, feature).
std::vector<LocalSummaryRecord> local_summary(const ShapMatrix& shap, const Matrix& x);

void write_global_csv(const std::string& path, const GlobalImportance& importance);
void write_local_csv(const std::string& path,
                     const std::vector<LocalSummaryRecord>& records);

}  // namespace crashsev
