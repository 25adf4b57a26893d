#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crashsev/core.hpp"

namespace crashsev {

/// feature < 0 marks a leaf. Internal nodes route x[feature] < threshold to
/// left, otherwise right.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> row) const {
        int i = 0;
        while (nodes[i].feature >= 0) {
            i = row[nodes[i].feature] < nodes[i].threshold ? nodes[i].left
                                                           : nodes[i].right;
        }
        return nodes[i].value;
    }
};

enum class SplitCriterion { Gini, Entropy };

struct TreeConfig {
    SplitCriterion criterion = SplitCriterion::Gini;
    int max_depth = 1 << 20;
    int min_samples_leaf = 1;
    int max_features = 0;       // 0 = consider every feature
    double split_gamma = 0.0;   // minimum gain (second-order mode)
    std::uint64_t seed = 0;     // drives per-split feature subsampling
};

// Greedy CART. Candidate thresholds are midpoints of consecutive distinct
// sorted values; ties between equal gains break toward the lowest feature
// index, then the lowest threshold. Leaves carry the (weighted) class-1
// fraction. An empty weight span means unit weights.
Tree grow_tree(const Matrix& x, std::span<const int> y,
               std::span<const double> sample_weight, const TreeConfig& config);

/// Second-order mode: maximizes ½(G_L²/(H_L+1) + G_R²/(H_R+1) − G²/(H+1)),
/// requires gain ≥ split_gamma, and leaves carry −G/(H+1).
Tree grow_tree_grad(const Matrix& x, std::span<const double> grad,
                    std::span<const double> hess, const TreeConfig& config);

}  // namespace crashsev
