#pragma once

#include <string>
#include <vector>

#include "crashsev/encode.hpp"

namespace crashsev {

/// Maximum-likelihood logistic fit with per-coefficient Wald statistics.
/// The intercept is fitted alongside but reported separately; it is never a
/// selection candidate.
struct LogitFit {
    std::vector<std::string> column_names;
    std::vector<double> coef;
    std::vector<double> se;
    std::vector<double> z;
    std::vector<double> p;
    std::vector<double> ci95_low, ci95_high;  // matches the printed [0.025, 0.975]
    std::vector<double> ci90_low, ci90_high;  // the 90%-confidence view
    double intercept = 0.0;
    double intercept_se = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_inf_norm = 0.0;
};

/// Newton (IRLS) maximization of the Bernoulli log-likelihood until the
/// gradient infinity-norm drops below tol. A 1e-8 ridge keeps the observed
/// information invertible; a fit wandering past |coef| 20 is flagged as
/// unconverged (quasi-separation) instead of being reported.
LogitFit fit_logit_wald(const DesignMatrix& x, int max_iter = 100, double tol = 1e-8);

struct SelectionReport {
    std::vector<std::string> kept;                        // p < alpha, input order
    std::vector<std::pair<std::string, double>> dropped;  // name, p-value
    double alpha = 0.1;
};

SelectionReport select_significant(const LogitFit& fit, double alpha);

/// CSV with the familiar columns: feature, coef, std_err, z, p_value,
/// ci_0.025, ci_0.975, ci_0.05, ci_0.95, kept.
void write_selection_csv(const std::string& path, const LogitFit& fit,
                         const SelectionReport& report);

}  // namespace crashsev
