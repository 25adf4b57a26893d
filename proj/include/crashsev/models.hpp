#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "crashsev/encode.hpp"
#include "crashsev/svm.hpp"
#include "crashsev/tree.hpp"

namespace crashsev {

enum class ModelKind { Logistic, Tree, Forest, Svm, Adaboost, Gbt };

ModelKind model_kind_from_string(const std::string& name);
std::string to_string(ModelKind kind);
const std::vector<ModelKind>& all_model_kinds();

using ParamValue = std::variant<double, std::string>;

/// Keyed hyperparameter map; keys and ranges are validated per model kind.
class Hyperparams {
public:
    Hyperparams() = default;

    void set(const std::string& key, ParamValue value) { values_[key] = std::move(value); }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    double number(const std::string& key) const;
    int integer(const std::string& key) const;
    std::string text(const std::string& key) const;

    const std::map<std::string, ParamValue>& values() const { return values_; }

    /// Throws ConfigError naming the key and reason.
    void validate(ModelKind kind) const;

    /// This map overlaid on the kind's defaults.
    Hyperparams resolved(ModelKind kind) const;

    static Hyperparams defaults(ModelKind kind);

    bool operator==(const Hyperparams&) const = default;

private:
    std::map<std::string, ParamValue> values_;
};

struct LogisticModel {
    std::vector<double> weights;
    double intercept = 0.0;
};

struct ForestModel {
    std::vector<Tree> trees;
};

// Boosted additive ensemble; for adaboost the leaves already hold the clipped
// half-log-odds contributions, for gbt the raw second-order leaf values.
struct EnsembleModel {
    std::vector<Tree> trees;
    double learning_rate = 1.0;
};

struct FittedModel {
    ModelKind kind = ModelKind::Logistic;
    Hyperparams params;
    std::vector<std::string> columns;
    std::variant<LogisticModel, Tree, ForestModel, SvmModel, EnsembleModel> impl;

    /// The model's additive score: linear predictor (logistic), leaf/mean
    /// probability (tree, forest), decision value (svm), or boosting margin.
    double margin(std::span<const double> row) const;

    /// Probability of class 1 from the margin.
    double probability(std::span<const double> row) const;

    bool is_tree_based() const {
        return kind == ModelKind::Tree || kind == ModelKind::Forest ||
               kind == ModelKind::Adaboost || kind == ModelKind::Gbt;
    }
};

FittedModel fit_model(ModelKind kind, const Hyperparams& params, const DesignMatrix& x,
                      std::uint64_t seed);

/// Scores every row; throws ModelError when columns do not match training.
std::vector<double> predict_proba(const FittedModel& model, const DesignMatrix& x);
std::vector<double> predict_margin(const FittedModel& model, const DesignMatrix& x);

/// label = 1 iff probability >= threshold.
std::vector<int> predict_label(const FittedModel& model, const DesignMatrix& x,
                               double threshold = 0.5);

std::string model_to_json_text(const FittedModel& model);
FittedModel model_from_json_text(const std::string& text);
void save_model(const std::string& path, const FittedModel& model);
FittedModel load_model(const std::string& path);

}  // namespace crashsev
