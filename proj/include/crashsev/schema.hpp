#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crashsev/core.hpp"

namespace crashsev {

/// Cut points for turning a continuous feature into labeled bins.
/// edges must be strictly increasing; labels.size() == edges.size() + 1.
/// Value v falls in bin i where i is the first edge with v <= edges[i],
/// or the last bin when v exceeds every edge.
struct BinningRule {
    std::vector<double> edges;
    std::vector<std::string> labels;
};

struct CategoricalSpec {
    std::vector<std::string> levels;
    // Optional sampling weights for synth_generate; empty means uniform.
    std::vector<double> weights;
};

struct ContinuousSpec {
    double min = 0.0;
    double max = 1.0;
    std::optional<BinningRule> bins;
};

struct FeatureSpec {
    std::string name;
    std::variant<CategoricalSpec, ContinuousSpec> kind;

    bool is_categorical() const { return std::holds_alternative<CategoricalSpec>(kind); }
    const CategoricalSpec& categorical() const { return std::get<CategoricalSpec>(kind); }
    const ContinuousSpec& continuous() const { return std::get<ContinuousSpec>(kind); }
};

struct TargetSpec {
    std::string name = "injury_severity";
    std::string negative_label = "non-serious";  // encoded 0
    std::string positive_label = "serious";      // encoded 1
};

class FeatureSchema {
public:
    std::vector<FeatureSpec> features;
    TargetSpec target;

    void validate() const;  // throws ConfigError on violation
    int feature_index(const std::string& name) const;  // -1 if absent

    static FeatureSchema from_json_file(const std::string& path);
    static FeatureSchema from_json_text(const std::string& text);
    std::string to_json_text() const;

    /// The 18-feature crash schema (19 with the optional vehicle age feature).
    static FeatureSchema crash_default(bool include_vehicle_year = true);
};

/// Column storage: level indices for categoricals, raw reals for continuous.
using ColumnData = std::variant<std::vector<int>, std::vector<double>>;

struct Dataset {
    FeatureSchema schema;
    std::vector<ColumnData> columns;  // one per schema feature
    std::vector<int> labels;          // each 0 or 1

    std::size_t n_rows() const { return labels.size(); }
    Dataset select_rows(std::span<const std::size_t> indices) const;
};

struct LoadResult {
    Dataset dataset;
    std::size_t dropped_rows = 0;  // rows removed for missing/unparseable values
};

/// Reads a CSV whose header must cover every schema feature plus the target.
/// Extra columns are ignored. Rows with a missing or unparseable schema value
/// are dropped and counted. A target value outside the declared vocabulary is
/// an error naming the offending row.
LoadResult load_csv(const std::string& path, const FeatureSchema& schema);

/// Writes a Dataset back out as CSV (schema columns + target).
void write_dataset_csv(const std::string& path, const Dataset& dataset);

/// Log-odds shifts keyed by "feature=level" (or "feature=bin_label" for
/// binned continuous features).
class EffectTable {
public:
    EffectTable() = default;
    void add(const std::string& key, double log_odds);
    static EffectTable from_json_text(const std::string& text);

    /// Validates every key against the schema; throws ConfigError otherwise.
    void validate(const FeatureSchema& schema) const;

    const std::map<std::string, double>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

private:
    std::map<std::string, double> entries_;
};

/// Draws n rows with independent features (categoricals by declared weights,
/// continuous uniform over [min,max]) and Bernoulli labels through
/// sigmoid(intercept + Σ effects). The intercept is bisected until the
/// realized positive share lands within ±0.02 of positive_rate.
Dataset synth_generate(const FeatureSchema& schema, std::size_t n, double positive_rate,
                       const EffectTable& effects, std::uint64_t seed);

struct SplitPair {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
    double test_fraction = 0.0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

/// Class-stratified random split; deterministic per seed. Per-class test
/// counts are allocated by largest remainder so the test size is
/// round(test_fraction·n).
SplitPair stratified_split(const Dataset& dataset, double test_fraction,
                           std::uint64_t seed);

/// Bin index of v under a binning rule (v <= edges[i] picks bin i).
int bin_index(const BinningRule& rule, double v);

}  // namespace crashsev
