#include <doctest.h>

#include <cmath>

#include "crashsev/smote.hpp"

using namespace crashsev;

namespace {

DesignMatrix matrix_of(std::vector<std::vector<double>> rows, std::vector<int> labels) {
    DesignMatrix m;
    const std::size_t p = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < p; ++c) m.column_names.push_back("x" + std::to_string(c));
    m.values = Matrix(rows.size(), p);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::copy(rows[r].begin(), rows[r].end(), m.values.row(r).begin());
    }
    m.labels = std::move(labels);
    return m;
}

// Largest residual of projecting each synthetic row onto the segment between
// its best-matching parent pair; also checks hull containment per coordinate.
void check_geometry(const DesignMatrix& before, const DesignMatrix& after) {
    std::vector<std::size_t> minority;
    std::int64_t pos = 0;
    for (int label : before.labels) pos += label;
    const int minority_label =
        pos * 2 <= static_cast<std::int64_t>(before.labels.size()) ? 1 : 0;
    for (std::size_t i = 0; i < before.n_rows(); ++i) {
        if (before.labels[i] == minority_label) minority.push_back(i);
    }

    for (std::size_t s = before.n_rows(); s < after.n_rows(); ++s) {
        const auto row = after.values.row(s);
        CHECK(after.labels[s] == minority_label);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a : minority) {
            for (std::size_t b : minority) {
                if (a == b) continue;
                const auto pa = before.values.row(a);
                const auto pb = before.values.row(b);
                // Decompose row = pa + t(pb-pa); residual off the segment.
                double num = 0.0, den = 0.0;
                for (std::size_t c = 0; c < row.size(); ++c) {
                    num += (row[c] - pa[c]) * (pb[c] - pa[c]);
                    den += (pb[c] - pa[c]) * (pb[c] - pa[c]);
                }
                const double t = den > 0.0 ? num / den : 0.0;
                if (t < -1e-12 || t > 1.0 + 1e-12) continue;
                double residual = 0.0;
                bool inside_hull = true;
                for (std::size_t c = 0; c < row.size(); ++c) {
                    const double proj = pa[c] + t * (pb[c] - pa[c]);
                    residual += (row[c] - proj) * (row[c] - proj);
                    const double lo = std::min(pa[c], pb[c]);
                    const double hi = std::max(pa[c], pb[c]);
                    if (row[c] < lo - 1e-12 || row[c] > hi + 1e-12) inside_hull = false;
                }
                if (inside_hull) best = std::min(best, residual);
            }
        }
        CHECK(best < 1e-9);
    }
}

}  // namespace

TEST_CASE("synthetic point lies on the segment between two minority rows") {
    const DesignMatrix m = matrix_of(
        {{0, 0}, {1, 1}, {5, 0}, {0, 5}, {5, 5}, {6, 6}, {7, 5}}, {1, 1, 0, 0, 0, 0, 0});
    SmoteConfig config;
    config.k_neighbors = 1;
    config.target_ratio = 3.0 / 5.0;  // one synthetic row
    config.seed = 4;
    const DesignMatrix out = smote(m, config);
    REQUIRE(out.n_rows() == 8);
    const double x = out.values.at(7, 0);
    const double y = out.values.at(7, 1);
    CHECK(x == doctest::Approx(y));  // on the diagonal segment
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    CHECK(out.labels[7] == 1);
}

TEST_CASE("input already at the target ratio is returned unchanged") {
    const DesignMatrix m = matrix_of({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {1, 1, 0, 0});
    SmoteConfig config;
    config.k_neighbors = 1;
    config.target_ratio = 1.0;
    const DesignMatrix out = smote(m, config);
    CHECK(out.values == m.values);
    CHECK(out.labels == m.labels);
}

TEST_CASE("88/12 split of 1000 rows balances to 880/880") {
    Rng rng(31);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 1000; ++i) {
        rows.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
        labels.push_back(i < 120 ? 1 : 0);
    }
    const DesignMatrix m = matrix_of(rows, labels);
    SmoteConfig config;
    config.k_neighbors = 5;
    config.target_ratio = 1.0;
    config.seed = 11;
    const DesignMatrix out = smote(m, config);

    std::int64_t pos = 0, neg = 0;
    for (int label : out.labels) (label == 1 ? pos : neg) += 1;
    CHECK(neg == 880);
    CHECK(std::llabs(pos - 880) <= 1);
    CHECK(out.n_rows() - m.n_rows() == static_cast<std::size_t>(pos - 120));

    // Originals unchanged, in order, as a prefix.
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        CHECK(out.labels[r] == m.labels[r]);
        for (std::size_t c = 0; c < m.n_cols(); ++c) {
            CHECK(out.values.at(r, c) == m.values.at(r, c));
        }
    }
}

TEST_CASE("smote geometry holds over random datasets") {
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 30 + rng.bounded(60);
        const std::size_t p = 2 + rng.bounded(4);
        const std::size_t n_min = 5 + rng.bounded(8);
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> row(p);
            for (auto& v : row) v = rng.uniform() * 10.0 - 5.0;
            rows.push_back(std::move(row));
            labels.push_back(i < n_min ? 1 : 0);
        }
        const DesignMatrix m = matrix_of(rows, labels);
        SmoteConfig config;
        config.k_neighbors = 3;
        config.target_ratio = 0.5 + 0.5 * rng.uniform();
        config.seed = trial;
        const DesignMatrix out = smote(m, config);

        // Ratio within one row of target.
        std::int64_t pos = 0, neg = 0;
        for (int label : out.labels) (label == 1 ? pos : neg) += 1;
        CHECK(std::fabs(static_cast<double>(pos) -
                        config.target_ratio * static_cast<double>(neg)) <= 1.0);
        check_geometry(m, out);
    }
}

TEST_CASE("smote determinism and error paths") {
    const DesignMatrix m = matrix_of(
        {{0, 0}, {1, 1}, {2, 0}, {5, 5}, {6, 5}, {7, 5}, {8, 5}, {9, 5}},
        {1, 1, 1, 0, 0, 0, 0, 0});
    SmoteConfig config;
    config.k_neighbors = 2;
    config.target_ratio = 1.0;
    config.seed = 5;
    const DesignMatrix a = smote(m, config);
    const DesignMatrix b = smote(m, config);
    CHECK(a.values == b.values);

    SmoteConfig too_many = config;
    too_many.k_neighbors = 3;  // equals minority count
    CHECK_THROWS_AS(smote(m, too_many), ModelError);

    DesignMatrix single = m;
    single.labels.assign(single.labels.size(), 0);
    CHECK_THROWS_AS(smote(single, config), ModelError);
}
