#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crashsev/encode.hpp"
#include "crashsev/logit.hpp"
#include "crashsev/metrics.hpp"
#include "crashsev/schema.hpp"
#include "crashsev/shap.hpp"
#include "crashsev/smote.hpp"
#include "crashsev/tuning.hpp"

namespace crashsev {

struct SynthSpec {
    std::size_t n = 4520;
    double positive_rate = 0.12;
    EffectTable effects;
};

struct RunConfig {
    // Exactly one of csv_path / synth.
    std::optional<std::string> csv_path;
    std::optional<SynthSpec> synth;

    std::string schema_path;  // empty = built-in crash schema

    double test_fraction = 0.2;
    std::uint64_t split_seed = 42;

    bool smote_enabled = true;
    int smote_k = 5;
    double smote_ratio = 1.0;

    double selection_alpha = 0.10;

    std::vector<ModelKind> models;
    std::map<std::string, Grid> grids;  // by kind name; defaults fill the rest

    int cv_folds = 5;
    std::string scoring = "auc";

    std::string explain_target = "best";  // "best" or a kind name
    std::size_t background_size = 100;
    std::size_t explain_rows = 100;

    std::uint64_t master_seed = 1;
    std::string output_dir = "out";

    std::string canonical_json() const;
    void validate() const;

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_json_file(const std::string& path);
};

/// Everything up to and including feature selection; shared by the stagewise
/// CLI subcommands and the full run.
struct PipelineContext {
    FeatureSchema schema;
    Dataset dataset;
    std::size_t dropped_rows = 0;
    SplitPair split;
    std::vector<std::string> encoder_warnings;
    DesignMatrix train_encoded, test_encoded;  // every encoded column
    LogitFit selection_fit;
    SelectionReport selection;
    DesignMatrix train, test;  // restricted to the selected columns
};

PipelineContext prepare(const RunConfig& config);

struct ModelResult {
    ModelKind kind;
    ConfusionCounts confusion;
    MetricsReport metrics;
};

struct RunArtifacts {
    std::vector<ModelResult> table;   // config order
    ModelKind best = ModelKind::Logistic;
    std::string out_dir;
};

/// Full pipeline: ingest/synthesize → split → encode → select → per-model
/// grid search with in-fold SMOTE → refit on the SMOTE'd training split →
/// score the held-out test set once per model → explain the chosen model.
/// Persists every table/curve/report artifact plus a manifest; on a stage
/// failure writes the manifest of completed stages and rethrows.
RunArtifacts run_pipeline(const RunConfig& config, const std::string& out_dir);

/// Renders the comparison table, best-model call (max recall, ties by AUC),
/// and top global attributions from a completed run directory.
std::string emit_report(const std::string& out_dir);

/// Best model by max recall, ties broken by AUC (undefined ranks lowest).
std::size_t best_model_index(const std::vector<ModelResult>& table);

void write_comparison_csv(const std::string& path,
                          const std::vector<ModelResult>& table);
std::vector<ModelResult> read_comparison_csv(const std::string& path);

}  // namespace crashsev
