#pragma once

#include <span>
#include <string>

// Arithmetic inner loops shared by the numeric modules (k-NN distances, the
// RBF kernel, IRLS normal equations). Each kernel has a scalar reference
// implementation and, on x86-64 with AVX2+FMA, a vectorized variant selected
// once at startup. The two variants are equivalence-tested against each other.

namespace crashsev::kernels {

/// Σ a[i]·b[i]
double dot(std::span<const double> a, std::span<const double> b);

/// Σ (a[i]−b[i])²
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Σ a[i]·b[i]·w[i]
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w);

/// Σ a[i]
double sum(std::span<const double> a);

/// y[i] += alpha·x[i]
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// Name of the backend the dispatcher selected ("avx2" or "scalar").
const std::string& active_backend();

// Reference implementations, always available; the dispatched entry points
// above must agree with these (exactly on integer-valued inputs, to 1e-12
// relative otherwise — vector lanes reassociate the sums).
namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w);
double sum(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace scalar

}  // namespace crashsev::kernels
