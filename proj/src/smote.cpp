#include "crashsev/smote.hpp"

#include <algorithm>
#include <cmath>

#include "crashsev/kernels.hpp"

namespace crashsev {

DesignMatrix smote(const DesignMatrix& train, const SmoteConfig& config) {
    if (config.k_neighbors < 1) throw ConfigError("smote: k_neighbors must be >= 1");
    if (!(config.target_ratio > 0.0 && config.target_ratio <= 1.0)) {
        throw ConfigError("smote: target_ratio must lie in (0,1]");
    }

    const std::size_t n = train.n_rows();
    std::vector<std::size_t> minority_rows, majority_rows;
    for (std::size_t i = 0; i < n; ++i) {
        (train.labels[i] == 1 ? minority_rows : majority_rows).push_back(i);
    }
    int minority_label = 1;
    if (minority_rows.size() > majority_rows.size()) {
        std::swap(minority_rows, majority_rows);
        minority_label = 0;
    }
    if (minority_rows.empty() || majority_rows.empty()) {
        throw ModelError("smote: both classes must be present");
    }

    const std::size_t n_min = minority_rows.size();
    const std::size_t n_maj = majority_rows.size();
    const std::size_t wanted = static_cast<std::size_t>(
        std::llround(config.target_ratio * static_cast<double>(n_maj)));
    if (wanted <= n_min) return train;  // already at or past the target ratio

    if (static_cast<std::size_t>(config.k_neighbors) >= n_min) {
        throw ModelError("smote: k_neighbors (" + std::to_string(config.k_neighbors) +
                         ") must be below the minority count (" + std::to_string(n_min) +
                         ")");
    }
    const std::size_t n_syn = wanted - n_min;
    const std::size_t k = static_cast<std::size_t>(config.k_neighbors);

    // k nearest minority neighbors per minority row; ties by lower row index.
    std::vector<std::vector<std::size_t>> neighbors(n_min);
    std::vector<std::pair<double, std::size_t>> dists;
    for (std::size_t a = 0; a < n_min; ++a) {
        dists.clear();
        const auto row_a = train.values.row(minority_rows[a]);
        for (std::size_t b = 0; b < n_min; ++b) {
            if (b == a) continue;
            dists.emplace_back(
                kernels::squared_distance(row_a, train.values.row(minority_rows[b])), b);
        }
        std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
        neighbors[a].reserve(k);
        for (std::size_t j = 0; j < k; ++j) neighbors[a].push_back(dists[j].second);
    }

    // Quota per seed row: evenly, remainder to the earliest rows.
    const std::size_t base = n_syn / n_min;
    const std::size_t extra = n_syn % n_min;

    DesignMatrix out;
    out.column_names = train.column_names;
    out.values = Matrix(n + n_syn, train.n_cols());
    std::copy(train.values.data().begin(), train.values.data().end(),
              out.values.data().begin());
    out.labels = train.labels;
    out.labels.resize(n + n_syn, minority_label);

    std::size_t next = n;
    for (std::size_t a = 0; a < n_min; ++a) {
        const std::size_t quota = base + (a < extra ? 1 : 0);
        if (quota == 0) continue;
        Rng rng(derive_seed(config.seed, {0x510fe, a}));
        const auto seed_row = train.values.row(minority_rows[a]);
        for (std::size_t q = 0; q < quota; ++q) {
            const std::size_t nn = neighbors[a][rng.bounded(k)];
            const double u = rng.uniform();
            const auto nn_row = train.values.row(minority_rows[nn]);
            auto dst = out.values.row(next++);
            for (std::size_t c = 0; c < train.n_cols(); ++c) {
                dst[c] = seed_row[c] + u * (nn_row[c] - seed_row[c]);
            }
        }
    }
    return out;
}

}  // namespace crashsev
