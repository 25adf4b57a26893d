#include "crashsev/shap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "crashsev/csv.hpp"

namespace crashsev {

double explain_score(const FittedModel& model, std::span<const double> row) {
    switch (model.kind) {
        case ModelKind::Logistic:
        case ModelKind::Svm:
            return model.probability(row);
        default:
            return model.margin(row);
    }
}

std::vector<double> shap_brute_force(const FittedModel& model,
                                     std::span<const double> row,
                                     const Matrix& background) {
    const std::size_t p = row.size();
    if (p > 20) {
        throw ConfigError("shap_brute_force: p (" + std::to_string(p) +
                          ") exceeds the 2^p enumeration limit of 20");
    }
    if (background.rows() == 0) throw DataError("shap_brute_force: empty background");

    // Shapley kernel weights w(s) = s!(p−s−1)!/p!.
    std::vector<double> log_fact(p + 1, 0.0);
    for (std::size_t i = 1; i <= p; ++i) log_fact[i] = log_fact[i - 1] + std::log(i);
    std::vector<double> weight(p);
    for (std::size_t s = 0; s < p; ++s) {
        weight[s] = std::exp(log_fact[s] + log_fact[p - s - 1] - log_fact[p]);
    }

    std::vector<double> phi(p, 0.0);
    const std::size_t n_subsets = std::size_t{1} << p;
    std::vector<double> value(n_subsets);
    std::vector<double> hybrid(p);
    for (std::size_t b = 0; b < background.rows(); ++b) {
        const auto z = background.row(b);
        for (std::size_t mask = 0; mask < n_subsets; ++mask) {
            for (std::size_t j = 0; j < p; ++j) {
                hybrid[j] = (mask >> j) & 1 ? row[j] : z[j];
            }
            value[mask] = explain_score(model, hybrid);
        }
        for (std::size_t j = 0; j < p; ++j) {
            const std::size_t bit = std::size_t{1} << j;
            for (std::size_t mask = 0; mask < n_subsets; ++mask) {
                if (mask & bit) continue;
                const int size = std::popcount(mask);
                phi[j] += weight[size] * (value[mask | bit] - value[mask]);
            }
        }
    }
    for (auto& v : phi) v /= static_cast<double>(background.rows());
    return phi;
}

namespace {

// Per-(row, background) traversal. Along a path a feature is either
// unconstrained, forced to the explained row's side, or forced to the
// background's side; a leaf reached with a row-forced and b background-forced
// distinct features contributes v·(a−1)!b!/(a+b)! to each row-forced feature
// and −v·a!(b−1)!/(a+b)! to each background-forced one.
class PairTraversal {
public:
    PairTraversal(std::size_t p) : state_(p, 0), fact_(64, 1.0) {
        for (std::size_t i = 1; i < fact_.size(); ++i) {
            fact_[i] = fact_[i - 1] * static_cast<double>(i);
        }
    }

    void run(const Tree& tree, std::span<const double> x, std::span<const double> z,
             double scale, std::span<double> phi) {
        tree_ = &tree;
        x_ = x;
        z_ = z;
        scale_ = scale;
        phi_ = phi;
        visit(0, 0, 0);
    }

private:
    void contribute(double value, int a, int b) {
        if (a + b == 0) return;  // both paths agree; nothing to attribute
        const double denom = fact_[a + b];
        if (a > 0) {
            const double w = fact_[a - 1] * fact_[b] / denom;
            for (const auto& [feature, side] : path_) {
                if (side == 1) phi_[feature] += value * w;
            }
        }
        if (b > 0) {
            const double w = fact_[a] * fact_[b - 1] / denom;
            for (const auto& [feature, side] : path_) {
                if (side == 2) phi_[feature] -= value * w;
            }
        }
    }

    void visit(int node_id, int a, int b) {
        const TreeNode& node = tree_->nodes[node_id];
        if (node.feature < 0) {
            contribute(node.value * scale_, a, b);
            return;
        }
        const bool x_left = x_[node.feature] < node.threshold;
        const bool z_left = z_[node.feature] < node.threshold;
        if (x_left == z_left) {
            visit(x_left ? node.left : node.right, a, b);
            return;
        }
        const std::int8_t s = state_[node.feature];
        if (s != 2) {  // x-side branch unless already forced to background
            const bool fresh = s == 0;
            if (fresh) {
                state_[node.feature] = 1;
                path_.emplace_back(node.feature, 1);
            }
            visit(x_left ? node.left : node.right, a + (fresh ? 1 : 0), b);
            if (fresh) {
                state_[node.feature] = 0;
                path_.pop_back();
            }
        }
        if (s != 1) {  // background-side branch unless already forced to x
            const bool fresh = s == 0;
            if (fresh) {
                state_[node.feature] = 2;
                path_.emplace_back(node.feature, 2);
            }
            visit(z_left ? node.left : node.right, a, b + (fresh ? 1 : 0));
            if (fresh) {
                state_[node.feature] = 0;
                path_.pop_back();
            }
        }
    }

    const Tree* tree_ = nullptr;
    std::span<const double> x_, z_;
    double scale_ = 1.0;
    std::span<double> phi_;
    std::vector<std::int8_t> state_;
    std::vector<std::pair<int, std::int8_t>> path_;
    std::vector<double> fact_;
};

// Component trees with the scale that makes the model's margin their sum.
std::pair<const std::vector<Tree>*, double> additive_trees(const FittedModel& model) {
    switch (model.kind) {
        case ModelKind::Forest: {
            const auto& m = std::get<ForestModel>(model.impl);
            return {&m.trees, 1.0 / static_cast<double>(m.trees.size())};
        }
        case ModelKind::Adaboost:
        case ModelKind::Gbt: {
            const auto& m = std::get<EnsembleModel>(model.impl);
            return {&m.trees, m.learning_rate};
        }
        default:
            return {nullptr, 1.0};
    }
}

}  // namespace

std::vector<double> shap_tree(const FittedModel& model, std::span<const double> row,
                              const Matrix& background) {
    if (!model.is_tree_based()) {
        throw ModelError("shap_tree: model kind " + to_string(model.kind) +
                         " is not tree-based; use shap_brute_force");
    }
    if (background.rows() == 0) throw DataError("shap_tree: empty background");

    const std::size_t p = row.size();
    std::vector<double> phi(p, 0.0);
    PairTraversal traversal(p);

    const Tree* single = std::get_if<Tree>(&model.impl);
    const auto [trees, scale] = additive_trees(model);
    for (std::size_t b = 0; b < background.rows(); ++b) {
        const auto z = background.row(b);
        if (single) {
            traversal.run(*single, row, z, 1.0, phi);
        } else {
            for (const auto& tree : *trees) {
                traversal.run(tree, row, z, scale, phi);
            }
        }
    }
    for (auto& v : phi) v /= static_cast<double>(background.rows());
    return phi;
}

ShapMatrix explain_rows(const FittedModel& model, const Matrix& rows,
                        const Matrix& background) {
    if (rows.cols() != model.columns.size()) {
        throw DataError("explain_rows: column count mismatch");
    }
    if (background.cols() != rows.cols()) {
        throw DataError("explain_rows: background column count mismatch");
    }
    ShapMatrix shap;
    shap.column_names = model.columns;
    shap.values = Matrix(rows.rows(), rows.cols());

    double base = 0.0;
    for (std::size_t b = 0; b < background.rows(); ++b) {
        base += explain_score(model, background.row(b));
    }
    shap.base_value = base / static_cast<double>(background.rows());

    for (std::size_t r = 0; r < rows.rows(); ++r) {
        const auto phi = model.is_tree_based()
                             ? shap_tree(model, rows.row(r), background)
                             : shap_brute_force(model, rows.row(r), background);
        std::copy(phi.begin(), phi.end(), shap.values.row(r).begin());
    }
    return shap;
}

GlobalImportance global_importance(const ShapMatrix& shap) {
    if (shap.values.rows() == 0) throw DataError("global_importance: empty matrix");
    GlobalImportance importance;
    for (std::size_t j = 0; j < shap.values.cols(); ++j) {
        double total = 0.0;
        for (std::size_t r = 0; r < shap.values.rows(); ++r) {
            total += std::fabs(shap.values.at(r, j));
        }
        importance.entries.emplace_back(shap.column_names[j],
                                        total / static_cast<double>(shap.values.rows()));
    }
    std::sort(importance.entries.begin(), importance.entries.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });
    return importance;
}

std::vector<LocalSummaryRecord> local_summary(const ShapMatrix& shap, const Matrix& x) {
    if (shap.values.rows() != x.rows() || shap.values.cols() != x.cols()) {
        throw DataError("local_summary: shape mismatch");
    }
    const std::size_t n = x.rows(), p = x.cols();

    // Rank over distinct values per column, scaled to [0,1].
    std::vector<std::vector<double>> norm(p, std::vector<double>(n));
    std::vector<double> distinct;
    for (std::size_t j = 0; j < p; ++j) {
        distinct.clear();
        for (std::size_t r = 0; r < n; ++r) distinct.push_back(x.at(r, j));
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 2) {
            std::fill(norm[j].begin(), norm[j].end(), 0.5);
            continue;
        }
        const double denom = static_cast<double>(distinct.size() - 1);
        for (std::size_t r = 0; r < n; ++r) {
            const auto it =
                std::lower_bound(distinct.begin(), distinct.end(), x.at(r, j));
            norm[j][r] = static_cast<double>(it - distinct.begin()) / denom;
        }
    }

    std::vector<LocalSummaryRecord> records;
    records.reserve(n * p);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < p; ++j) {
            records.push_back(
                {r, shap.column_names[j], shap.values.at(r, j), norm[j][r]});
        }
    }
    return records;
}

void write_global_csv(const std::string& path, const GlobalImportance& importance) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "feature,mean_abs_shap,rank\n";
    for (std::size_t i = 0; i < importance.entries.size(); ++i) {
        out << csv::escape(importance.entries[i].first) << ','
            << csv::format_double(importance.entries[i].second) << ',' << (i + 1)
            << '\n';
    }
}

void write_local_csv(const std::string& path,
                     const std::vector<LocalSummaryRecord>& records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "row,feature,shap,norm_value\n";
    for (const auto& rec : records) {
        out << rec.row << ',' << csv::escape(rec.feature) << ','
            << csv::format_double(rec.shap) << ',' << csv::format_double(rec.norm_value)
            << '\n';
    }
}

}  // namespace crashsev
