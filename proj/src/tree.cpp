#include "crashsev/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crashsev {

namespace {

double impurity(double w1, double w, SplitCriterion criterion) {
    if (w <= 0.0) return 0.0;
    const double q = w1 / w;
    if (criterion == SplitCriterion::Gini) return 2.0 * q * (1.0 - q);
    double h = 0.0;
    if (q > 0.0) h -= q * std::log2(q);
    if (q < 1.0) h -= (1.0 - q) * std::log2(1.0 - q);
    return h;
}

struct Builder {
    const Matrix& x;
    std::span<const int> y;            // classification mode
    std::span<const double> weight;    // empty = unit weights
    std::span<const double> grad;      // second-order mode
    std::span<const double> hess;
    const TreeConfig& config;
    bool grad_mode;
    Rng rng;
    std::vector<TreeNode> nodes;

    double w_of(std::size_t i) const { return weight.empty() ? 1.0 : weight[i]; }

    double leaf_value(const std::vector<std::size_t>& idx) const {
        if (grad_mode) {
            double g = 0.0, h = 0.0;
            for (std::size_t i : idx) {
                g += grad[i];
                h += hess[i];
            }
            return -g / (h + 1.0);
        }
        double w1 = 0.0, w = 0.0;
        for (std::size_t i : idx) {
            w += w_of(i);
            if (y[i] == 1) w1 += w_of(i);
        }
        return w > 0.0 ? w1 / w : 0.0;
    }

    std::vector<int> candidate_features() {
        const int p = static_cast<int>(x.cols());
        std::vector<int> features(p);
        std::iota(features.begin(), features.end(), 0);
        if (config.max_features > 0 && config.max_features < p) {
            for (int i = 0; i < config.max_features; ++i) {
                std::swap(features[i],
                          features[i + rng.bounded(static_cast<std::size_t>(p - i))]);
            }
            features.resize(config.max_features);
            std::sort(features.begin(), features.end());
        }
        return features;
    }

    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    Split best_split(const std::vector<std::size_t>& idx) {
        Split best;
        const auto features = candidate_features();
        const std::size_t n = idx.size();

        std::vector<std::pair<double, std::size_t>> sorted(n);
        for (int f : features) {
            for (std::size_t i = 0; i < n; ++i) {
                sorted[i] = {x.at(idx[i], f), idx[i]};
            }
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            if (grad_mode) {
                double g_total = 0.0, h_total = 0.0;
                for (std::size_t i : idx) {
                    g_total += grad[i];
                    h_total += hess[i];
                }
                const double parent = g_total * g_total / (h_total + 1.0);
                double g_left = 0.0, h_left = 0.0;
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    g_left += grad[sorted[i].second];
                    h_left += hess[sorted[i].second];
                    if (sorted[i].first == sorted[i + 1].first) continue;
                    const std::size_t n_left = i + 1, n_right = n - n_left;
                    if (n_left < static_cast<std::size_t>(config.min_samples_leaf) ||
                        n_right < static_cast<std::size_t>(config.min_samples_leaf)) {
                        continue;
                    }
                    const double g_right = g_total - g_left;
                    const double h_right = h_total - h_left;
                    const double gain =
                        0.5 * (g_left * g_left / (h_left + 1.0) +
                               g_right * g_right / (h_right + 1.0) - parent);
                    if (gain > best.gain) {
                        best = {f, 0.5 * (sorted[i].first + sorted[i + 1].first), gain};
                    }
                }
            } else {
                double w_total = 0.0, w1_total = 0.0;
                for (std::size_t i : idx) {
                    w_total += w_of(i);
                    if (y[i] == 1) w1_total += w_of(i);
                }
                const double parent = impurity(w1_total, w_total, config.criterion);
                double w_left = 0.0, w1_left = 0.0;
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    const std::size_t row = sorted[i].second;
                    w_left += w_of(row);
                    if (y[row] == 1) w1_left += w_of(row);
                    if (sorted[i].first == sorted[i + 1].first) continue;
                    const std::size_t n_left = i + 1, n_right = n - n_left;
                    if (n_left < static_cast<std::size_t>(config.min_samples_leaf) ||
                        n_right < static_cast<std::size_t>(config.min_samples_leaf)) {
                        continue;
                    }
                    const double w_right = w_total - w_left;
                    const double w1_right = w1_total - w1_left;
                    const double gain =
                        parent -
                        (w_left / w_total) * impurity(w1_left, w_left, config.criterion) -
                        (w_right / w_total) *
                            impurity(w1_right, w_right, config.criterion);
                    if (gain > best.gain) {
                        best = {f, 0.5 * (sorted[i].first + sorted[i + 1].first), gain};
                    }
                }
            }
        }
        return best;
    }

    bool is_pure(const std::vector<std::size_t>& idx) const {
        if (grad_mode) return false;
        const int first = y[idx[0]];
        return std::all_of(idx.begin(), idx.end(),
                           [&](std::size_t i) { return y[i] == first; });
    }

    int build(const std::vector<std::size_t>& idx, int depth) {
        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();

        const bool stop =
            depth >= config.max_depth ||
            idx.size() < 2 * static_cast<std::size_t>(config.min_samples_leaf) ||
            is_pure(idx);
        Split split;
        if (!stop) split = best_split(idx);
        const double min_gain = grad_mode ? std::max(config.split_gamma, 0.0) : 0.0;
        if (stop || split.feature < 0 || split.gain <= 0.0 || split.gain < min_gain) {
            nodes[node_id].value = leaf_value(idx);
            return node_id;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            (x.at(i, split.feature) < split.threshold ? left_idx : right_idx)
                .push_back(i);
        }
        nodes[node_id].feature = split.feature;
        nodes[node_id].threshold = split.threshold;
        nodes[node_id].left = build(left_idx, depth + 1);
        nodes[node_id].right = build(right_idx, depth + 1);
        return node_id;
    }
};

Tree run_builder(Builder& builder, std::size_t n) {
    if (n == 0) throw DataError("grow_tree: empty input");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(idx, 0);
    Tree tree;
    tree.nodes = std::move(builder.nodes);
    return tree;
}

}  // namespace

Tree grow_tree(const Matrix& x, std::span<const int> y,
               std::span<const double> sample_weight, const TreeConfig& config) {
    for (int label : y) {
        if (label != 0 && label != 1) throw DataError("grow_tree: labels must be 0/1");
    }
    Builder builder{x,  y,    sample_weight, {}, {}, config, false,
                    Rng(config.seed), {}};
    return run_builder(builder, x.rows());
}

Tree grow_tree_grad(const Matrix& x, std::span<const double> grad,
                    std::span<const double> hess, const TreeConfig& config) {
    Builder builder{x,  {},   {}, grad, hess, config, true,
                    Rng(config.seed), {}};
    return run_builder(builder, x.rows());
}

}  // namespace crashsev
