#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crashsev/models.hpp"
#include "crashsev/smote.hpp"

namespace crashsev {

/// Hyperparameter grid: ordered axes, each with candidate values. Cells
/// enumerate in row-major order over the axis order given (the JSON loader
/// orders axes alphabetically by key).
struct Grid {
    ModelKind kind = ModelKind::Logistic;
    std::vector<std::pair<std::string, std::vector<ParamValue>>> axes;

    std::size_t n_cells() const;
    Hyperparams cell(std::size_t index) const;
    void validate() const;

    static Grid from_json_text(ModelKind kind, const std::string& text);
    static Grid defaults(ModelKind kind);
};

struct FoldAssignment {
    std::vector<int> fold_of_row;
    int k = 0;
};

/// Stratified fold assignment: fold sizes differ by at most one and every
/// fold's positive count is within one of the proportional share.
FoldAssignment stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

struct CvCell {
    Hyperparams params;
    std::vector<double> fold_scores;
    std::vector<std::size_t> fold_fit_rows;  // rows fitted per fold (post-SMOTE)
    double mean_score = 0.0;
    bool failed = false;  // at least one fold fit threw; mean forced to −inf
};

struct TuneResult {
    ModelKind kind = ModelKind::Logistic;
    std::string scoring;
    int folds = 0;
    std::uint64_t seed = 0;
    std::vector<CvCell> cells;  // full Cartesian product, grid order
    std::size_t best_index = 0;
    Hyperparams best_params;
    FoldAssignment fold_assignment;
    // Index bookkeeping, auditable: per fold, the exact row sets used.
    std::vector<std::vector<std::size_t>> fold_train_indices;
    std::vector<std::vector<std::size_t>> fold_valid_indices;

    std::string to_json_text() const;
};

/// Exhaustive grid search with stratified k-fold CV. SMOTE, when configured,
/// is applied to the k−1 training folds only. Ties on mean score break to the
/// earliest cell. scoring ∈ {auc, accuracy, recall, f1}; a fold where the
/// metric is undefined scores 0, a fold whose fit throws marks the whole cell
/// failed with mean −inf.
TuneResult grid_search(ModelKind kind, const Grid& grid, const DesignMatrix& train,
                       int k, const std::string& scoring,
                       const std::optional<SmoteConfig>& smote_config,
                       std::uint64_t seed);

/// Scores predictions against truth with a named metric (see grid_search).
double metric_score(const std::string& scoring, std::span<const int> y_true,
                    std::span<const double> proba);

}  // namespace crashsev
