#pragma once

#include <cmath>

namespace crashsev {

/// Numerically stable logistic function.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// log(1 + exp(x)) without overflow for large |x|.
inline double log1pexp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

/// Standard normal CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Two-sided p-value of a z statistic.
inline double two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

/// Standard normal quantile (Acklam's rational approximation plus one
/// Halley refinement; accurate to ~1e-15 over (0,1)).
double norm_quantile(double p);

}  // namespace crashsev
