#pragma once

#include <cstdint>

#include "crashsev/encode.hpp"

namespace crashsev {

struct SmoteConfig {
    int k_neighbors = 5;
    double target_ratio = 1.0;  // minority/majority after resampling
    std::uint64_t seed = 0;
};

/// Appends synthetic minority rows x_i + u·(x_nn − x_i) until the
/// minority/majority ratio reaches target_ratio (within one row). Original
/// rows come first, unchanged and in order. Already balanced input (ratio at
/// or above target) is returned as-is. Neighbor ties break toward the lower
/// row index; each minority row draws from its own (seed, row)-derived stream.
DesignMatrix smote(const DesignMatrix& train, const SmoteConfig& config);

}  // namespace crashsev
