#pragma once

#include <optional>
#include <vector>

#include "crashsev/core.hpp"

namespace crashsev {

/// Cholesky factor (lower) of a symmetric positive-definite matrix, or
/// nullopt when a pivot collapses.
std::optional<Matrix> cholesky(const Matrix& a);

/// Solves L·Lᵀ·x = b given the Cholesky factor.
std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b);

/// Full inverse from the Cholesky factor.
Matrix cholesky_inverse(const Matrix& l);

}  // namespace crashsev
