#pragma once

#include <functional>
#include <vector>

#include "crashsev/core.hpp"

namespace crashsev {

struct SvmModel {
    Matrix support_vectors;       // rows with alpha > 0
    std::vector<double> sv_coef;  // alpha_i * y_i per support vector
    double rho = 0.0;
    double gamma = 1.0;
    double platt_a = 0.0;  // P(y=1|f) = 1 / (1 + exp(a*f + b))
    double platt_b = 0.0;
    int iterations = 0;
    double final_gap = 0.0;  // KKT violation at termination

    /// Raw decision value Σ coef·K(sv, x) − rho.
    double decision_value(std::span<const double> row) const;
    /// Platt-calibrated probability of class 1.
    double probability(std::span<const double> row) const;
};

struct SvmConfig {
    double c = 1.0;
    double gamma = 1.0;
    double tol = 1e-3;   // stopping threshold on the maximal KKT violation
    int max_iter = 0;    // 0 = max(100000, 20n)
};

/// Dual objective reported once per SMO iteration (monotonicity checks).
using SvmObserver = std::function<void(int iteration, double dual_objective)>;

/// Soft-margin RBF C-SVC solved by sequential minimal optimization with
/// second-order working-set selection, then Platt scaling fitted on the
/// training decision values. Labels are {0,1}; throws ModelError when the
/// iteration cap is reached before the KKT gap closes.
SvmModel train_svm_rbf(const Matrix& x, std::span<const int> y, const SvmConfig& config,
                       const SvmObserver& observer = nullptr);

}  // namespace crashsev
