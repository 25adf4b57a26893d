#include "crashsev/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crashsev/kernels.hpp"
#include "crashsev/linalg.hpp"
#include "crashsev/stats.hpp"

namespace crashsev {

using nlohmann::json;

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "logistic") return ModelKind::Logistic;
    if (name == "tree") return ModelKind::Tree;
    if (name == "forest") return ModelKind::Forest;
    if (name == "svm") return ModelKind::Svm;
    if (name == "adaboost") return ModelKind::Adaboost;
    if (name == "gbt") return ModelKind::Gbt;
    throw ConfigError("unknown model kind: " + name);
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Logistic: return "logistic";
        case ModelKind::Tree: return "tree";
        case ModelKind::Forest: return "forest";
        case ModelKind::Svm: return "svm";
        case ModelKind::Adaboost: return "adaboost";
        case ModelKind::Gbt: return "gbt";
    }
    return "?";
}

const std::vector<ModelKind>& all_model_kinds() {
    static const std::vector<ModelKind> kinds = {
        ModelKind::Logistic, ModelKind::Tree,     ModelKind::Forest,
        ModelKind::Svm,      ModelKind::Adaboost, ModelKind::Gbt};
    return kinds;
}

double Hyperparams::number(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing hyperparameter: " + key);
    if (const double* v = std::get_if<double>(&it->second)) return *v;
    throw ConfigError("hyperparameter '" + key + "' must be numeric");
}

int Hyperparams::integer(const std::string& key) const {
    const double v = number(key);
    const double r = std::round(v);
    if (std::fabs(v - r) > 1e-9) {
        throw ConfigError("hyperparameter '" + key + "' must be an integer");
    }
    return static_cast<int>(r);
}

std::string Hyperparams::text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing hyperparameter: " + key);
    if (const std::string* v = std::get_if<std::string>(&it->second)) return *v;
    throw ConfigError("hyperparameter '" + key + "' must be a string");
}

Hyperparams Hyperparams::defaults(ModelKind kind) {
    Hyperparams p;
    switch (kind) {
        case ModelKind::Logistic:
            p.set("C", 1.0);
            p.set("penalty", std::string("l2"));
            p.set("solver", std::string("newton-cg"));
            break;
        case ModelKind::Tree:
            p.set("criterion", std::string("entropy"));
            p.set("max_depth", 23.0);
            p.set("min_samples_leaf", 1.0);
            break;
        case ModelKind::Forest:
            p.set("criterion", std::string("gini"));
            p.set("max_depth", 19.0);
            p.set("max_features", std::string("sqrt"));
            p.set("n_estimators", 50.0);
            p.set("bootstrap", 1.0);
            break;
        case ModelKind::Svm:
            p.set("C", 9.0);
            p.set("gamma", std::string("auto"));
            p.set("kernel", std::string("rbf"));
            break;
        case ModelKind::Adaboost:
            p.set("algorithm", std::string("SAMME.R"));
            p.set("learning_rate", 0.85);
            p.set("n_estimators", 25.0);
            break;
        case ModelKind::Gbt:
            p.set("gamma", 1.0);
            p.set("learning_rate", 0.75);
            p.set("max_depth", 13.0);
            p.set("n_estimators", 25.0);
            break;
    }
    return p;
}

Hyperparams Hyperparams::resolved(ModelKind kind) const {
    Hyperparams out = defaults(kind);
    for (const auto& [key, value] : values_) out.set(key, value);
    out.validate(kind);
    return out;
}

namespace {

void fail_param(const std::string& key, const std::string& reason) {
    throw ConfigError("hyperparameter '" + key + "': " + reason);
}

}  // namespace

void Hyperparams::validate(ModelKind kind) const {
    std::vector<std::string> known;
    switch (kind) {
        case ModelKind::Logistic: known = {"C", "penalty", "solver"}; break;
        case ModelKind::Tree: known = {"criterion", "max_depth", "min_samples_leaf"}; break;
        case ModelKind::Forest:
            known = {"criterion", "max_depth", "max_features", "n_estimators",
                     "bootstrap"};
            break;
        case ModelKind::Svm: known = {"C", "gamma", "kernel"}; break;
        case ModelKind::Adaboost:
            known = {"algorithm", "learning_rate", "n_estimators"};
            break;
        case ModelKind::Gbt:
            known = {"gamma", "learning_rate", "max_depth", "n_estimators"};
            break;
    }
    for (const auto& [key, value] : values_) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            fail_param(key, "not recognized for model kind " + to_string(kind));
        }
    }
    if (has("C") && !(number("C") > 0.0)) fail_param("C", "must be positive");
    if (has("learning_rate") && !(number("learning_rate") > 0.0)) {
        fail_param("learning_rate", "must be positive");
    }
    if (has("n_estimators") && integer("n_estimators") < 1) {
        fail_param("n_estimators", "must be >= 1");
    }
    if (has("max_depth") && integer("max_depth") < 1) {
        fail_param("max_depth", "must be >= 1");
    }
    if (has("min_samples_leaf") && integer("min_samples_leaf") < 1) {
        fail_param("min_samples_leaf", "must be >= 1");
    }
    if (has("criterion")) {
        const std::string c = text("criterion");
        if (c != "gini" && c != "entropy") fail_param("criterion", "must be gini or entropy");
    }
    if (has("penalty") && text("penalty") != "l2") fail_param("penalty", "only l2 is supported");
    if (has("kernel") && text("kernel") != "rbf") fail_param("kernel", "only rbf is supported");
    if (has("algorithm") && text("algorithm") != "SAMME.R") {
        fail_param("algorithm", "only SAMME.R is supported");
    }
    if (kind == ModelKind::Svm && has("gamma")) {
        if (const auto* s = std::get_if<std::string>(&values_.at("gamma"))) {
            if (*s != "auto") fail_param("gamma", "must be 'auto' or a positive number");
        } else if (!(number("gamma") > 0.0)) {
            fail_param("gamma", "must be 'auto' or a positive number");
        }
    }
    if (kind == ModelKind::Gbt && has("gamma") && !(number("gamma") >= 0.0)) {
        fail_param("gamma", "must be >= 0");
    }
    if (has("max_features")) {
        if (const auto* s = std::get_if<std::string>(&values_.at("max_features"))) {
            if (*s != "sqrt") fail_param("max_features", "must be 'sqrt' or an integer >= 1");
        } else if (integer("max_features") < 1) {
            fail_param("max_features", "must be 'sqrt' or an integer >= 1");
        }
    }
    if (has("bootstrap")) {
        const double b = number("bootstrap");
        if (b != 0.0 && b != 1.0) fail_param("bootstrap", "must be true or false");
    }
}

namespace {

constexpr double kProbClip = 1e-12;

SplitCriterion criterion_from(const Hyperparams& p) {
    return p.text("criterion") == "entropy" ? SplitCriterion::Entropy
                                            : SplitCriterion::Gini;
}

void require_both_classes(const DesignMatrix& x) {
    bool pos = false, neg = false;
    for (int label : x.labels) {
        if (label == 1) pos = true;
        else if (label == 0) neg = true;
        else throw DataError("fit_model: labels must be 0/1");
    }
    if (!pos || !neg) throw ModelError("fit_model: both classes must be present");
}

// Newton minimization of ½‖w‖² + C·Σ log(1+exp(−ỹ·(w·x+b))), intercept
// unpenalized, step halving on the objective.
LogisticModel fit_logistic(const DesignMatrix& x, const Hyperparams& params) {
    const double c = params.number("C");
    const std::size_t n = x.n_rows();
    const std::size_t p = x.n_cols();
    const std::size_t d = p + 1;  // intercept last

    std::vector<double> beta(d, 0.0);

    const auto eta_of = [&](std::span<const double> b, std::size_t r) {
        return kernels::dot(x.values.row(r), std::span<const double>(b.data(), p)) +
               b[p];
    };
    const auto objective = [&](std::span<const double> b) {
        double obj = 0.0;
        for (std::size_t j = 0; j < p; ++j) obj += 0.5 * b[j] * b[j];
        for (std::size_t r = 0; r < n; ++r) {
            const double m = (x.labels[r] == 1 ? 1.0 : -1.0) * eta_of(b, r);
            obj += c * log1pexp(-m);
        }
        return obj;
    };

    std::vector<double> grad(d), mu(n), w(n);
    Matrix hess(d, d);
    double obj = objective(beta);
    for (int iter = 0; iter < 200; ++iter) {
        for (std::size_t r = 0; r < n; ++r) {
            mu[r] = sigmoid(eta_of(beta, r));
            w[r] = mu[r] * (1.0 - mu[r]);
        }
        for (std::size_t j = 0; j < p; ++j) grad[j] = beta[j];
        grad[p] = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double resid = c * (mu[r] - static_cast<double>(x.labels[r]));
            kernels::axpy(resid, x.values.row(r),
                          std::span<double>(grad.data(), p));
            grad[p] += resid;
        }
        double g_norm = 0.0;
        for (double g : grad) g_norm = std::max(g_norm, std::fabs(g));
        if (g_norm < 1e-6) break;

        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = a; b < d; ++b) {
                double s = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const double xa = a < p ? x.values.at(r, a) : 1.0;
                    const double xb = b < p ? x.values.at(r, b) : 1.0;
                    s += xa * xb * w[r];
                }
                s *= c;
                if (a == b) s += a < p ? 1.0 : 1e-12;
                hess.at(a, b) = hess.at(b, a) = s;
            }
        }
        const auto chol = cholesky(hess);
        if (!chol) throw ModelError("logistic: singular Hessian");
        auto step = cholesky_solve(*chol, grad);

        const double slack = 1e-12 * std::max(1.0, std::fabs(obj));
        double scale = 1.0;
        std::vector<double> candidate(d);
        for (int half = 0; half < 40; ++half) {
            for (std::size_t a = 0; a < d; ++a) candidate[a] = beta[a] - scale * step[a];
            const double new_obj = objective(candidate);
            if (new_obj <= obj + slack) {
                beta = candidate;
                obj = new_obj;
                break;
            }
            scale *= 0.5;
        }
    }

    LogisticModel model;
    model.weights.assign(beta.begin(), beta.begin() + p);
    model.intercept = beta[p];
    return model;
}

int resolve_max_features(const Hyperparams& params, std::size_t p) {
    if (const auto* s = std::get_if<std::string>(&params.values().at("max_features"))) {
        (void)s;  // validated as "sqrt"
        return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(p)))));
    }
    return std::min(params.integer("max_features"), static_cast<int>(p));
}

ForestModel fit_forest(const DesignMatrix& x, const Hyperparams& params,
                       std::uint64_t seed) {
    const int n_estimators = params.integer("n_estimators");
    const bool bootstrap = params.number("bootstrap") != 0.0;
    TreeConfig config;
    config.criterion = criterion_from(params);
    config.max_depth = params.integer("max_depth");
    config.min_samples_leaf = 1;
    config.max_features = resolve_max_features(params, x.n_cols());

    const std::size_t n = x.n_rows();
    ForestModel model;
    model.trees.reserve(n_estimators);
    for (int t = 0; t < n_estimators; ++t) {
        config.seed = derive_seed(seed, {0xf0e57, static_cast<std::uint64_t>(t), 1});
        if (bootstrap) {
            Rng rng(derive_seed(seed, {0xf0e57, static_cast<std::uint64_t>(t), 2}));
            std::vector<std::size_t> idx(n);
            for (auto& i : idx) i = rng.bounded(n);
            const Matrix xb = x.values.select_rows(idx);
            std::vector<int> yb(n);
            for (std::size_t i = 0; i < n; ++i) yb[i] = x.labels[idx[i]];
            model.trees.push_back(grow_tree(xb, yb, {}, config));
        } else {
            model.trees.push_back(grow_tree(x.values, x.labels, {}, config));
        }
    }
    return model;
}

// SAMME.R with depth-1 probability stumps. Leaves are rewritten to carry the
// clipped half-log-odds so the ensemble is a plain additive margin.
EnsembleModel fit_adaboost(const DesignMatrix& x, const Hyperparams& params) {
    const int rounds = params.integer("n_estimators");
    const double lr = params.number("learning_rate");
    const std::size_t n = x.n_rows();

    TreeConfig config;
    config.criterion = SplitCriterion::Gini;
    config.max_depth = 1;
    config.min_samples_leaf = 1;

    EnsembleModel model;
    model.learning_rate = lr;
    std::vector<double> weight(n, 1.0 / static_cast<double>(n));

    for (int m = 0; m < rounds; ++m) {
        Tree stump = grow_tree(x.values, x.labels, weight, config);

        double err = 0.0;
        std::vector<double> prob(n);
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = stump.predict(x.values.row(i));
            const int hard = prob[i] >= 0.5 ? 1 : 0;
            if (hard != x.labels[i]) err += weight[i];
        }
        if (err >= 0.5) break;  // weak-learner contract violated; stop boosting

        for (auto& node : stump.nodes) {
            if (node.feature < 0) {
                const double v = std::clamp(node.value, kProbClip, 1.0 - kProbClip);
                node.value = 0.5 * std::log(v / (1.0 - v));
            }
        }
        model.trees.push_back(stump);
        if (err == 0.0) break;  // perfect stump; nothing left to reweight

        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = std::clamp(prob[i], kProbClip, 1.0 - kProbClip);
            const double h = 0.5 * std::log(p / (1.0 - p));
            const double sign = x.labels[i] == 1 ? 1.0 : -1.0;
            weight[i] *= std::exp(-lr * sign * h);
            total += weight[i];
        }
        for (auto& w : weight) w /= total;
    }
    return model;
}

EnsembleModel fit_gbt(const DesignMatrix& x, const Hyperparams& params,
                      std::uint64_t seed) {
    const int rounds = params.integer("n_estimators");
    const double lr = params.number("learning_rate");
    const std::size_t n = x.n_rows();

    TreeConfig config;
    config.max_depth = params.integer("max_depth");
    config.min_samples_leaf = 1;
    config.split_gamma = params.number("gamma");

    EnsembleModel model;
    model.learning_rate = lr;
    std::vector<double> margin(n, 0.0), grad(n), hess(n);
    for (int m = 0; m < rounds; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            grad[i] = p - static_cast<double>(x.labels[i]);
            hess[i] = p * (1.0 - p);
        }
        config.seed = derive_seed(seed, {0x9b7, static_cast<std::uint64_t>(m)});
        Tree tree = grow_tree_grad(x.values, grad, hess, config);
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += lr * tree.predict(x.values.row(i));
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

SvmModel fit_svm(const DesignMatrix& x, const Hyperparams& params) {
    SvmConfig config;
    config.c = params.number("C");
    if (std::holds_alternative<std::string>(params.values().at("gamma"))) {
        config.gamma = 1.0 / static_cast<double>(x.n_cols());  // "auto"
    } else {
        config.gamma = params.number("gamma");
    }
    return train_svm_rbf(x.values, x.labels, config);
}

}  // namespace

FittedModel fit_model(ModelKind kind, const Hyperparams& params, const DesignMatrix& x,
                      std::uint64_t seed) {
    if (x.n_rows() == 0 || x.n_cols() == 0) throw DataError("fit_model: empty matrix");
    require_both_classes(x);
    const Hyperparams resolved = params.resolved(kind);

    FittedModel model;
    model.kind = kind;
    model.params = resolved;
    model.columns = x.column_names;
    switch (kind) {
        case ModelKind::Logistic: model.impl = fit_logistic(x, resolved); break;
        case ModelKind::Tree: {
            TreeConfig config;
            config.criterion = criterion_from(resolved);
            config.max_depth = resolved.integer("max_depth");
            config.min_samples_leaf = resolved.integer("min_samples_leaf");
            config.seed = seed;
            model.impl = grow_tree(x.values, x.labels, {}, config);
            break;
        }
        case ModelKind::Forest: model.impl = fit_forest(x, resolved, seed); break;
        case ModelKind::Svm: model.impl = fit_svm(x, resolved); break;
        case ModelKind::Adaboost: model.impl = fit_adaboost(x, resolved); break;
        case ModelKind::Gbt: model.impl = fit_gbt(x, resolved, seed); break;
    }
    return model;
}

double FittedModel::margin(std::span<const double> row) const {
    switch (kind) {
        case ModelKind::Logistic: {
            const auto& m = std::get<LogisticModel>(impl);
            return kernels::dot(row, m.weights) + m.intercept;
        }
        case ModelKind::Tree:
            return std::get<Tree>(impl).predict(row);
        case ModelKind::Forest: {
            const auto& m = std::get<ForestModel>(impl);
            double s = 0.0;
            for (const auto& tree : m.trees) s += tree.predict(row);
            return s / static_cast<double>(m.trees.size());
        }
        case ModelKind::Svm:
            return std::get<SvmModel>(impl).decision_value(row);
        case ModelKind::Adaboost:
        case ModelKind::Gbt: {
            const auto& m = std::get<EnsembleModel>(impl);
            double s = 0.0;
            for (const auto& tree : m.trees) s += tree.predict(row);
            return m.learning_rate * s;
        }
    }
    return 0.0;
}

double FittedModel::probability(std::span<const double> row) const {
    switch (kind) {
        case ModelKind::Logistic: return sigmoid(margin(row));
        case ModelKind::Tree:
        case ModelKind::Forest: return std::clamp(margin(row), 0.0, 1.0);
        case ModelKind::Svm: return std::get<SvmModel>(impl).probability(row);
        case ModelKind::Adaboost: return sigmoid(2.0 * margin(row));
        case ModelKind::Gbt: return sigmoid(margin(row));
    }
    return 0.5;
}

namespace {

void check_columns(const FittedModel& model, const DesignMatrix& x) {
    if (model.columns == x.column_names) return;
    std::string msg = "column mismatch; model expects [";
    for (std::size_t i = 0; i < model.columns.size(); ++i) {
        if (i) msg += ", ";
        msg += model.columns[i];
    }
    msg += "] but got [";
    for (std::size_t i = 0; i < x.column_names.size(); ++i) {
        if (i) msg += ", ";
        msg += x.column_names[i];
    }
    msg += "]";
    throw ModelError(msg);
}

}  // namespace

std::vector<double> predict_proba(const FittedModel& model, const DesignMatrix& x) {
    check_columns(model, x);
    std::vector<double> out(x.n_rows());
    for (std::size_t r = 0; r < x.n_rows(); ++r) {
        out[r] = model.probability(x.values.row(r));
    }
    return out;
}

std::vector<double> predict_margin(const FittedModel& model, const DesignMatrix& x) {
    check_columns(model, x);
    std::vector<double> out(x.n_rows());
    for (std::size_t r = 0; r < x.n_rows(); ++r) {
        out[r] = model.margin(x.values.row(r));
    }
    return out;
}

std::vector<int> predict_label(const FittedModel& model, const DesignMatrix& x,
                               double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ConfigError("predict_label: threshold must lie in [0,1]");
    }
    const auto scores = predict_proba(model, x);
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        labels[i] = scores[i] >= threshold ? 1 : 0;
    }
    return labels;
}

namespace {

json params_to_json(const Hyperparams& params) {
    json j = json::object();
    for (const auto& [key, value] : params.values()) {
        if (const auto* s = std::get_if<std::string>(&value)) {
            j[key] = *s;
        } else {
            const double v = std::get<double>(value);
            if (key == "bootstrap") j[key] = v != 0.0;
            else if (v == std::round(v) &&
                     (key == "max_depth" || key == "n_estimators" ||
                      key == "min_samples_leaf" || key == "max_features")) {
                j[key] = static_cast<std::int64_t>(v);
            } else {
                j[key] = v;
            }
        }
    }
    return j;
}

Hyperparams params_from_json(const json& j) {
    Hyperparams p;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) p.set(key, value.get<std::string>());
        else if (value.is_boolean()) p.set(key, value.get<bool>() ? 1.0 : 0.0);
        else if (value.is_number()) p.set(key, value.get<double>());
        else throw ConfigError("hyperparameter '" + key + "' has unsupported type");
    }
    return p;
}

json tree_to_json(const Tree& tree) {
    json j;
    auto& feature = j["feature"] = json::array();
    auto& threshold = j["threshold"] = json::array();
    auto& left = j["left"] = json::array();
    auto& right = j["right"] = json::array();
    auto& value = j["value"] = json::array();
    for (const auto& node : tree.nodes) {
        feature.push_back(node.feature);
        threshold.push_back(node.threshold);
        left.push_back(node.left);
        right.push_back(node.right);
        value.push_back(node.value);
    }
    return j;
}

Tree tree_from_json(const json& j) {
    Tree tree;
    const auto& feature = j.at("feature");
    tree.nodes.resize(feature.size());
    for (std::size_t i = 0; i < feature.size(); ++i) {
        tree.nodes[i].feature = j.at("feature")[i].get<int>();
        tree.nodes[i].threshold = j.at("threshold")[i].get<double>();
        tree.nodes[i].left = j.at("left")[i].get<int>();
        tree.nodes[i].right = j.at("right")[i].get<int>();
        tree.nodes[i].value = j.at("value")[i].get<double>();
    }
    return tree;
}

json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    m.data() = j.at("data").get<std::vector<double>>();
    return m;
}

}  // namespace

std::string model_to_json_text(const FittedModel& model) {
    json j;
    j["format_version"] = 1;
    j["kind"] = to_string(model.kind);
    j["params"] = params_to_json(model.params);
    j["columns"] = model.columns;
    json body;
    switch (model.kind) {
        case ModelKind::Logistic: {
            const auto& m = std::get<LogisticModel>(model.impl);
            body = {{"weights", m.weights}, {"intercept", m.intercept}};
            break;
        }
        case ModelKind::Tree:
            body = {{"tree", tree_to_json(std::get<Tree>(model.impl))}};
            break;
        case ModelKind::Forest: {
            json trees = json::array();
            for (const auto& tree : std::get<ForestModel>(model.impl).trees) {
                trees.push_back(tree_to_json(tree));
            }
            body = {{"trees", std::move(trees)}};
            break;
        }
        case ModelKind::Svm: {
            const auto& m = std::get<SvmModel>(model.impl);
            body = {{"support_vectors", matrix_to_json(m.support_vectors)},
                    {"sv_coef", m.sv_coef},
                    {"rho", m.rho},
                    {"gamma", m.gamma},
                    {"platt_a", m.platt_a},
                    {"platt_b", m.platt_b}};
            break;
        }
        case ModelKind::Adaboost:
        case ModelKind::Gbt: {
            const auto& m = std::get<EnsembleModel>(model.impl);
            json trees = json::array();
            for (const auto& tree : m.trees) trees.push_back(tree_to_json(tree));
            body = {{"trees", std::move(trees)}, {"learning_rate", m.learning_rate}};
            break;
        }
    }
    j["model"] = std::move(body);
    return j.dump(2);
}

FittedModel model_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("model JSON parse error: ") + e.what());
    }
    if (j.at("format_version").get<int>() != 1) {
        throw DataError("unsupported model format_version");
    }
    FittedModel model;
    model.kind = model_kind_from_string(j.at("kind").get<std::string>());
    model.params = params_from_json(j.at("params"));
    model.columns = j.at("columns").get<std::vector<std::string>>();
    const json& body = j.at("model");
    switch (model.kind) {
        case ModelKind::Logistic: {
            LogisticModel m;
            m.weights = body.at("weights").get<std::vector<double>>();
            m.intercept = body.at("intercept").get<double>();
            model.impl = std::move(m);
            break;
        }
        case ModelKind::Tree:
            model.impl = tree_from_json(body.at("tree"));
            break;
        case ModelKind::Forest: {
            ForestModel m;
            for (const auto& t : body.at("trees")) m.trees.push_back(tree_from_json(t));
            model.impl = std::move(m);
            break;
        }
        case ModelKind::Svm: {
            SvmModel m;
            m.support_vectors = matrix_from_json(body.at("support_vectors"));
            m.sv_coef = body.at("sv_coef").get<std::vector<double>>();
            m.rho = body.at("rho").get<double>();
            m.gamma = body.at("gamma").get<double>();
            m.platt_a = body.at("platt_a").get<double>();
            m.platt_b = body.at("platt_b").get<double>();
            model.impl = std::move(m);
            break;
        }
        case ModelKind::Adaboost:
        case ModelKind::Gbt: {
            EnsembleModel m;
            for (const auto& t : body.at("trees")) m.trees.push_back(tree_from_json(t));
            m.learning_rate = body.at("learning_rate").get<double>();
            model.impl = std::move(m);
            break;
        }
    }
    return model;
}

void save_model(const std::string& path, const FittedModel& model) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << model_to_json_text(model) << '\n';
}

FittedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json_text(ss.str());
}

}  // namespace crashsev
