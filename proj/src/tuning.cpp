#include "crashsev/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "crashsev/metrics.hpp"

namespace crashsev {

using nlohmann::json;

std::size_t Grid::n_cells() const {
    std::size_t n = 1;
    for (const auto& [key, values] : axes) {
        (void)key;
        n *= values.size();
    }
    return n;
}

Hyperparams Grid::cell(std::size_t index) const {
    Hyperparams p;
    // Row-major: the last axis varies fastest.
    for (std::size_t a = axes.size(); a-- > 0;) {
        const auto& [key, values] = axes[a];
        p.set(key, values[index % values.size()]);
        index /= values.size();
    }
    return p;
}

void Grid::validate() const {
    if (axes.empty()) throw ConfigError("grid has no axes");
    for (const auto& [key, values] : axes) {
        if (values.empty()) throw ConfigError("grid axis '" + key + "' is empty");
    }
    // Every cell must resolve to valid params for the kind.
    for (std::size_t i = 0; i < n_cells(); ++i) cell(i).resolved(kind);
}

Grid Grid::from_json_text(ModelKind kind, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("grid JSON parse error: ") + e.what());
    }
    Grid grid;
    grid.kind = kind;
    for (const auto& [key, values] : j.items()) {
        if (!values.is_array()) {
            throw ConfigError("grid axis '" + key + "' must be an array");
        }
        std::vector<ParamValue> axis;
        for (const auto& v : values) {
            if (v.is_string()) axis.emplace_back(v.get<std::string>());
            else if (v.is_boolean()) axis.emplace_back(v.get<bool>() ? 1.0 : 0.0);
            else if (v.is_number()) axis.emplace_back(v.get<double>());
            else throw ConfigError("grid axis '" + key + "' has unsupported value type");
        }
        grid.axes.emplace_back(key, std::move(axis));
    }
    grid.validate();
    return grid;
}

Grid Grid::defaults(ModelKind kind) {
    Grid grid;
    grid.kind = kind;
    auto axis = [&](std::string key, std::vector<ParamValue> values) {
        grid.axes.emplace_back(std::move(key), std::move(values));
    };
    // Each default grid contains the tuned operating point for its kind.
    switch (kind) {
        case ModelKind::Logistic:
            axis("C", {0.0015, 1.0});
            break;
        case ModelKind::Tree:
            axis("criterion", {std::string("entropy")});
            axis("max_depth", {5.0, 23.0});
            break;
        case ModelKind::Forest:
            axis("max_depth", {19.0});
            axis("n_estimators", {25.0, 50.0});
            break;
        case ModelKind::Svm:
            axis("C", {1.0, 9.0});
            break;
        case ModelKind::Adaboost:
            axis("learning_rate", {0.85});
            axis("n_estimators", {10.0, 25.0});
            break;
        case ModelKind::Gbt:
            axis("max_depth", {3.0, 13.0});
            axis("n_estimators", {25.0});
            break;
    }
    return grid;
}

FoldAssignment stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("stratified_kfold: k must be >= 2");
    std::vector<std::size_t> neg, pos;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 1 ? pos : neg).push_back(i);
    }
    if (static_cast<int>(neg.size()) < k || static_cast<int>(pos.size()) < k) {
        throw DataError("stratified_kfold: each class needs at least k rows (neg=" +
                        std::to_string(neg.size()) + ", pos=" +
                        std::to_string(pos.size()) + ", k=" + std::to_string(k) + ")");
    }

    Rng rng(derive_seed(seed, {0xf01d5, 3}));
    rng.shuffle(neg);
    rng.shuffle(pos);

    FoldAssignment assignment;
    assignment.k = k;
    assignment.fold_of_row.assign(labels.size(), -1);
    // Deal both classes onto a single rotating fold counter: per-class counts
    // and overall fold sizes each stay within one of proportional.
    std::size_t next = 0;
    for (std::size_t i : neg) assignment.fold_of_row[i] = static_cast<int>(next++ % k);
    for (std::size_t i : pos) assignment.fold_of_row[i] = static_cast<int>(next++ % k);
    return assignment;
}

double metric_score(const std::string& scoring, std::span<const int> y_true,
                    std::span<const double> proba) {
    if (scoring == "auc") {
        return auc(roc_curve(y_true, proba));
    }
    std::vector<int> pred(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) pred[i] = proba[i] >= 0.5 ? 1 : 0;
    const auto report = score_set(confusion_counts(y_true, pred));
    std::optional<double> value;
    if (scoring == "accuracy") value = report.accuracy;
    else if (scoring == "recall") value = report.recall;
    else if (scoring == "f1") value = report.f1;
    else throw ConfigError("unknown scoring metric: " + scoring);
    return value.value_or(0.0);
}

TuneResult grid_search(ModelKind kind, const Grid& grid, const DesignMatrix& train,
                       int k, const std::string& scoring,
                       const std::optional<SmoteConfig>& smote_config,
                       std::uint64_t seed) {
    if (grid.kind != kind) throw ConfigError("grid_search: grid kind mismatch");
    grid.validate();

    TuneResult result;
    result.kind = kind;
    result.scoring = scoring;
    result.folds = k;
    result.seed = seed;
    result.fold_assignment = stratified_kfold(train.labels, k, seed);

    // Per-fold train/validation index sets, shared by every cell.
    std::vector<std::vector<std::size_t>> fold_train(k), fold_valid(k);
    for (std::size_t i = 0; i < train.n_rows(); ++i) {
        for (int f = 0; f < k; ++f) {
            (result.fold_assignment.fold_of_row[i] == f ? fold_valid[f] : fold_train[f])
                .push_back(i);
        }
    }
    std::vector<DesignMatrix> fold_train_matrix(k), fold_valid_matrix(k);
    for (int f = 0; f < k; ++f) {
        fold_train_matrix[f] = train.select_rows(fold_train[f]);
        fold_valid_matrix[f] = train.select_rows(fold_valid[f]);
    }
    result.fold_train_indices = fold_train;
    result.fold_valid_indices = fold_valid;

    const std::size_t n_cells = grid.n_cells();
    double best_mean = -std::numeric_limits<double>::infinity();
    result.best_index = 0;
    for (std::size_t cell_idx = 0; cell_idx < n_cells; ++cell_idx) {
        CvCell cell;
        cell.params = grid.cell(cell_idx);
        double total = 0.0;
        for (int f = 0; f < k; ++f) {
            double score;
            std::size_t fit_rows = 0;
            try {
                DesignMatrix fit_matrix = fold_train_matrix[f];
                if (smote_config) {
                    SmoteConfig fold_smote = *smote_config;
                    fold_smote.seed = derive_seed(
                        smote_config->seed,
                        {0x5e4c, cell_idx, static_cast<std::uint64_t>(f)});
                    fit_matrix = smote(fit_matrix, fold_smote);
                }
                fit_rows = fit_matrix.n_rows();
                const auto model = fit_model(
                    kind, cell.params, fit_matrix,
                    derive_seed(seed, {0x617d, cell_idx, static_cast<std::uint64_t>(f)}));
                const auto proba = predict_proba(model, fold_valid_matrix[f]);
                score = metric_score(scoring, fold_valid_matrix[f].labels, proba);
            } catch (const std::exception&) {
                cell.failed = true;
                score = -std::numeric_limits<double>::infinity();
            }
            cell.fold_scores.push_back(score);
            cell.fold_fit_rows.push_back(fit_rows);
            total += score;
        }
        cell.mean_score = cell.failed ? -std::numeric_limits<double>::infinity()
                                      : total / static_cast<double>(k);
        if (cell.mean_score > best_mean) {
            best_mean = cell.mean_score;
            result.best_index = cell_idx;
        }
        result.cells.push_back(std::move(cell));
    }
    result.best_params = result.cells[result.best_index].params;
    return result;
}

std::string TuneResult::to_json_text() const {
    json j;
    j["kind"] = crashsev::to_string(kind);
    j["scoring"] = scoring;
    j["folds"] = folds;
    j["seed"] = seed;
    j["best_index"] = best_index;
    auto params_json = [](const Hyperparams& p) {
        json out = json::object();
        for (const auto& [key, value] : p.values()) {
            if (const auto* s = std::get_if<std::string>(&value)) out[key] = *s;
            else out[key] = std::get<double>(value);
        }
        return out;
    };
    j["best_params"] = params_json(best_params);
    j["cells"] = json::array();
    for (const auto& cell : cells) {
        json c;
        c["params"] = params_json(cell.params);
        c["failed"] = cell.failed;
        c["fold_scores"] = json::array();
        for (double s : cell.fold_scores) {
            if (std::isinf(s)) c["fold_scores"].push_back("-inf");
            else c["fold_scores"].push_back(s);
        }
        if (std::isinf(cell.mean_score)) c["mean_score"] = "-inf";
        else c["mean_score"] = cell.mean_score;
        j["cells"].push_back(std::move(c));
    }
    return j.dump(2);
}

}  // namespace crashsev
