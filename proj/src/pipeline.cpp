#include "crashsev/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "crashsev/csv.hpp"

namespace crashsev {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json config_to_json(const RunConfig& c) {
    json j;
    if (c.csv_path) {
        j["data"] = {{"csv", *c.csv_path}};
    } else if (c.synth) {
        json effects = json::object();
        for (const auto& [key, value] : c.synth->effects.entries()) effects[key] = value;
        j["data"] = {{"synth",
                      {{"n", c.synth->n},
                       {"positive_rate", c.synth->positive_rate},
                       {"effects", effects}}}};
    }
    j["schema"] = c.schema_path.empty() ? "builtin" : c.schema_path;
    j["split"] = {{"test_fraction", c.test_fraction}, {"seed", c.split_seed}};
    j["smote"] = {{"enabled", c.smote_enabled},
                  {"k_neighbors", c.smote_k},
                  {"target_ratio", c.smote_ratio}};
    j["selection"] = {{"alpha", c.selection_alpha}};
    j["models"] = json::array();
    for (ModelKind kind : c.models) j["models"].push_back(to_string(kind));
    json grids = json::object();
    for (const auto& [name, grid] : c.grids) {
        json axes = json::object();
        for (const auto& [key, values] : grid.axes) {
            json arr = json::array();
            for (const auto& v : values) {
                if (const auto* s = std::get_if<std::string>(&v)) arr.push_back(*s);
                else arr.push_back(std::get<double>(v));
            }
            axes[key] = std::move(arr);
        }
        grids[name] = std::move(axes);
    }
    j["grids"] = std::move(grids);
    j["cv"] = {{"folds", c.cv_folds}, {"scoring", c.scoring}};
    j["explain"] = {{"target", c.explain_target},
                    {"background_size", c.background_size},
                    {"max_rows", c.explain_rows}};
    j["seed"] = c.master_seed;
    j["output_dir"] = c.output_dir;
    return j;
}

}  // namespace

std::string RunConfig::canonical_json() const { return config_to_json(*this).dump(2); }

void RunConfig::validate() const {
    if (csv_path.has_value() == synth.has_value()) {
        throw ConfigError("config needs exactly one data source (data.csv or data.synth)");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("split.test_fraction must lie in (0,1)");
    }
    if (smote_k < 1) throw ConfigError("smote.k_neighbors must be >= 1");
    if (!(smote_ratio > 0.0 && smote_ratio <= 1.0)) {
        throw ConfigError("smote.target_ratio must lie in (0,1]");
    }
    if (!(selection_alpha > 0.0 && selection_alpha <= 1.0)) {
        throw ConfigError("selection.alpha must lie in (0,1]");
    }
    if (models.empty()) throw ConfigError("config.models must not be empty");
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = i + 1; j < models.size(); ++j) {
            if (models[i] == models[j]) {
                throw ConfigError("config.models repeats " + to_string(models[i]));
            }
        }
    }
    if (cv_folds < 2) throw ConfigError("cv.folds must be >= 2");
    if (scoring != "auc" && scoring != "accuracy" && scoring != "recall" &&
        scoring != "f1") {
        throw ConfigError("cv.scoring must be one of auc/accuracy/recall/f1");
    }
    if (explain_target != "best") {
        const ModelKind kind = model_kind_from_string(explain_target);
        if (std::find(models.begin(), models.end(), kind) == models.end()) {
            throw ConfigError("explain.target names a model not in config.models");
        }
    }
    if (background_size == 0) throw ConfigError("explain.background_size must be >= 1");
    if (explain_rows == 0) throw ConfigError("explain.max_rows must be >= 1");
    for (const auto& [name, grid] : grids) {
        if (grid.kind != model_kind_from_string(name)) {
            throw ConfigError("grid '" + name + "' bound to the wrong model kind");
        }
        grid.validate();
    }
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    RunConfig c;
    try {
        const auto& data = j.at("data");
        if (data.contains("csv")) c.csv_path = data.at("csv").get<std::string>();
        if (data.contains("synth")) {
            SynthSpec spec;
            const auto& s = data.at("synth");
            spec.n = s.at("n").get<std::size_t>();
            spec.positive_rate = s.at("positive_rate").get<double>();
            if (s.contains("effects")) {
                for (const auto& [key, value] : s.at("effects").items()) {
                    spec.effects.add(key, value.get<double>());
                }
            }
            c.synth = std::move(spec);
        }
        if (j.contains("schema")) {
            const std::string schema = j.at("schema").get<std::string>();
            if (schema != "builtin") c.schema_path = schema;
        }
        if (j.contains("split")) {
            const auto& s = j.at("split");
            if (s.contains("test_fraction")) c.test_fraction = s.at("test_fraction").get<double>();
            if (s.contains("seed")) c.split_seed = s.at("seed").get<std::uint64_t>();
        }
        if (j.contains("smote")) {
            const auto& s = j.at("smote");
            if (s.contains("enabled")) c.smote_enabled = s.at("enabled").get<bool>();
            if (s.contains("k_neighbors")) c.smote_k = s.at("k_neighbors").get<int>();
            if (s.contains("target_ratio")) c.smote_ratio = s.at("target_ratio").get<double>();
        }
        if (j.contains("selection") && j.at("selection").contains("alpha")) {
            c.selection_alpha = j.at("selection").at("alpha").get<double>();
        }
        if (j.contains("models")) {
            for (const auto& m : j.at("models")) {
                c.models.push_back(model_kind_from_string(m.get<std::string>()));
            }
        } else {
            c.models = all_model_kinds();
        }
        if (j.contains("grids")) {
            for (const auto& [name, axes] : j.at("grids").items()) {
                c.grids[name] =
                    Grid::from_json_text(model_kind_from_string(name), axes.dump());
            }
        }
        if (j.contains("cv")) {
            const auto& s = j.at("cv");
            if (s.contains("folds")) c.cv_folds = s.at("folds").get<int>();
            if (s.contains("scoring")) c.scoring = s.at("scoring").get<std::string>();
        }
        if (j.contains("explain")) {
            const auto& s = j.at("explain");
            if (s.contains("target")) c.explain_target = s.at("target").get<std::string>();
            if (s.contains("background_size")) {
                c.background_size = s.at("background_size").get<std::size_t>();
            }
            if (s.contains("max_rows")) c.explain_rows = s.at("max_rows").get<std::size_t>();
        }
        if (j.contains("seed")) c.master_seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON structure error: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

PipelineContext prepare(const RunConfig& config) {
    config.validate();
    PipelineContext ctx;
    ctx.schema = config.schema_path.empty()
                     ? FeatureSchema::crash_default()
                     : FeatureSchema::from_json_file(config.schema_path);

    if (config.csv_path) {
        auto loaded = load_csv(*config.csv_path, ctx.schema);
        ctx.dataset = std::move(loaded.dataset);
        ctx.dropped_rows = loaded.dropped_rows;
    } else {
        ctx.dataset = synth_generate(ctx.schema, config.synth->n,
                                     config.synth->positive_rate, config.synth->effects,
                                     derive_seed(config.master_seed, {0x5d17a, 4}));
    }
    if (ctx.dataset.n_rows() == 0) throw DataError("no usable rows in input data");

    ctx.split = stratified_split(ctx.dataset, config.test_fraction, config.split_seed);

    const Encoder encoder = Encoder::fit(ctx.split.train);
    ctx.encoder_warnings = encoder.warnings();
    ctx.train_encoded = encoder.transform(ctx.split.train);
    ctx.test_encoded = encoder.transform(ctx.split.test);

    // Selection runs on the raw (un-resampled) training matrix.
    ctx.selection_fit = fit_logit_wald(ctx.train_encoded);
    ctx.selection = select_significant(ctx.selection_fit, config.selection_alpha);
    if (ctx.selection.kept.empty()) {
        throw DataError("feature selection kept no columns at alpha=" +
                        std::to_string(config.selection_alpha));
    }
    ctx.train = ctx.train_encoded.select_columns(ctx.selection.kept);
    ctx.test = ctx.test_encoded.select_columns(ctx.selection.kept);
    return ctx;
}

namespace {

struct StageLog {
    std::vector<std::string> stages;
    std::vector<json> access_log;
    std::vector<std::pair<std::string, double>> timings;  // seconds
    std::chrono::steady_clock::time_point mark = std::chrono::steady_clock::now();

    void done(const std::string& stage) {
        const auto now = std::chrono::steady_clock::now();
        timings.emplace_back(stage,
                             std::chrono::duration<double>(now - mark).count());
        mark = now;
        stages.push_back(stage);
    }

    void test_access(ModelKind kind) {
        access_log.push_back({{"event", "test_score"},
                              {"model", to_string(kind)},
                              {"after_stage", stages.back()},
                              {"ordinal", stages.size()}});
    }
};

void write_manifest(const std::string& out_dir, const RunConfig& config,
                    const PipelineContext* ctx, const StageLog& log,
                    const std::string& failed_stage) {
    json manifest;
    manifest["config_hash"] = [&] {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(config.canonical_json())));
        return std::string(buf);
    }();
    manifest["seeds"] = {{"master", config.master_seed}, {"split", config.split_seed}};
    if (ctx) {
        std::int64_t positives = 0;
        for (int label : ctx->dataset.labels) positives += label;
        manifest["data"] = {
            {"source", config.csv_path ? "csv" : "synth"},
            {"rows", ctx->dataset.n_rows()},
            {"dropped_rows", ctx->dropped_rows},
            {"positive_share",
             ctx->dataset.n_rows()
                 ? static_cast<double>(positives) / static_cast<double>(ctx->dataset.n_rows())
                 : 0.0},
            {"train_rows", ctx->split.train.n_rows()},
            {"test_rows", ctx->split.test.n_rows()},
            {"selected_columns", ctx->selection.kept}};
        manifest["warnings"] = ctx->encoder_warnings;
    }
    manifest["stages"] = log.stages;
    manifest["access_log"] = log.access_log;
    if (!failed_stage.empty()) manifest["failed_stage"] = failed_stage;
    std::ofstream out(out_dir + "/manifest.json");
    out << manifest.dump(2) << '\n';

    json timings = json::object();
    for (const auto& [stage, seconds] : log.timings) timings[stage] = seconds;
    std::ofstream tout(out_dir + "/timings.json");
    tout << timings.dump(2) << '\n';
}

}  // namespace

std::size_t best_model_index(const std::vector<ModelResult>& table) {
    if (table.empty()) throw DataError("best_model_index: empty table");
    const auto rank = [](const std::optional<double>& v) { return v.value_or(-1.0); };
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const double r = rank(table[i].metrics.recall);
        const double best_r = rank(table[best].metrics.recall);
        if (r > best_r ||
            (r == best_r && rank(table[i].metrics.auc) > rank(table[best].metrics.auc))) {
            best = i;
        }
    }
    return best;
}

void write_comparison_csv(const std::string& path,
                          const std::vector<ModelResult>& table) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "model,accuracy,precision,recall,f1,auc,tp,tn,fp,fn\n";
    for (const auto& row : table) {
        out << to_string(row.kind) << ',' << format_metric(row.metrics.accuracy) << ','
            << format_metric(row.metrics.precision) << ','
            << format_metric(row.metrics.recall) << ',' << format_metric(row.metrics.f1)
            << ',' << format_metric(row.metrics.auc) << ',' << row.confusion.tp << ','
            << row.confusion.tn << ',' << row.confusion.fp << ',' << row.confusion.fn
            << '\n';
    }
}

std::vector<ModelResult> read_comparison_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    std::vector<ModelResult> out;
    for (const auto& row : table.rows) {
        if (row.size() < 10) throw DataError("malformed comparison table: " + path);
        ModelResult r;
        r.kind = model_kind_from_string(row[0]);
        const auto parse = [](const std::string& s) -> std::optional<double> {
            if (s == "undefined") return std::nullopt;
            return std::stod(s);
        };
        r.metrics.accuracy = parse(row[1]);
        r.metrics.precision = parse(row[2]);
        r.metrics.recall = parse(row[3]);
        r.metrics.f1 = parse(row[4]);
        r.metrics.auc = parse(row[5]);
        r.confusion.tp = std::stoll(row[6]);
        r.confusion.tn = std::stoll(row[7]);
        r.confusion.fp = std::stoll(row[8]);
        r.confusion.fn = std::stoll(row[9]);
        out.push_back(std::move(r));
    }
    return out;
}

RunArtifacts run_pipeline(const RunConfig& config, const std::string& out_dir) {
    config.validate();
    fs::create_directories(out_dir);

    StageLog log;
    std::unique_ptr<PipelineContext> ctx;
    std::string stage = "prepare";
    try {
        ctx = std::make_unique<PipelineContext>(prepare(config));
        log.done("prepare");

        stage = "selection_report";
        write_selection_csv(out_dir + "/selection_report.csv", ctx->selection_fit,
                            ctx->selection);
        write_design_matrix_csv(out_dir + "/encoded_train.csv", ctx->train_encoded);
        log.done(stage);

        std::optional<SmoteConfig> smote_config;
        if (config.smote_enabled) {
            smote_config = SmoteConfig{config.smote_k, config.smote_ratio,
                                       derive_seed(config.master_seed, {0x5304e, 5})};
        }

        // Tune + refit every model before any test access.
        std::map<ModelKind, FittedModel> fitted;
        for (ModelKind kind : config.models) {
            stage = "tune:" + to_string(kind);
            const auto grid_it = config.grids.find(to_string(kind));
            const Grid grid =
                grid_it != config.grids.end() ? grid_it->second : Grid::defaults(kind);
            const TuneResult tuned = grid_search(
                kind, grid, ctx->train, config.cv_folds, config.scoring, smote_config,
                derive_seed(config.master_seed, {0x70e3, static_cast<std::uint64_t>(kind)}));
            std::ofstream(out_dir + "/tune_" + to_string(kind) + ".json")
                << tuned.to_json_text() << '\n';
            log.done(stage);

            stage = "fit:" + to_string(kind);
            DesignMatrix fit_matrix = ctx->train;
            if (smote_config) {
                SmoteConfig refit_smote = *smote_config;
                refit_smote.seed = derive_seed(
                    config.master_seed, {0xef17, static_cast<std::uint64_t>(kind)});
                fit_matrix = smote(fit_matrix, refit_smote);
            }
            FittedModel model = fit_model(
                kind, tuned.best_params, fit_matrix,
                derive_seed(config.master_seed, {0xf17, static_cast<std::uint64_t>(kind)}));
            save_model(out_dir + "/model_" + to_string(kind) + ".json", model);
            fitted.emplace(kind, std::move(model));
            log.done(stage);
        }

        // Single test read per model, after all tuning.
        RunArtifacts artifacts;
        artifacts.out_dir = out_dir;
        for (ModelKind kind : config.models) {
            stage = "evaluate:" + to_string(kind);
            const auto& model = fitted.at(kind);
            const auto proba = predict_proba(model, ctx->test);
            log.test_access(kind);
            std::vector<int> pred(proba.size());
            for (std::size_t i = 0; i < proba.size(); ++i) {
                pred[i] = proba[i] >= 0.5 ? 1 : 0;
            }
            ModelResult result;
            result.kind = kind;
            result.confusion = confusion_counts(ctx->test.labels, pred);
            result.metrics = score_set(result.confusion);
            const RocCurve curve = roc_curve(ctx->test.labels, proba);
            result.metrics.auc = auc(curve);
            write_roc_csv(out_dir + "/roc_" + to_string(kind) + ".csv", curve);
            artifacts.table.push_back(std::move(result));
            log.done(stage);
        }

        stage = "comparison_table";
        write_comparison_csv(out_dir + "/comparison_table.csv", artifacts.table);
        artifacts.best = artifacts.table[best_model_index(artifacts.table)].kind;
        log.done(stage);

        stage = "explain";
        const ModelKind target = config.explain_target == "best"
                                     ? artifacts.best
                                     : model_kind_from_string(config.explain_target);
        const auto& model = fitted.at(target);

        const auto sample_rows = [](const Matrix& m, std::size_t want,
                                    std::uint64_t seed) {
            if (m.rows() <= want) return m;
            std::vector<std::size_t> idx(m.rows());
            std::iota(idx.begin(), idx.end(), 0);
            Rng rng(seed);
            rng.shuffle(idx);
            idx.resize(want);
            std::sort(idx.begin(), idx.end());
            return m.select_rows(idx);
        };
        const Matrix background =
            sample_rows(ctx->train.values, config.background_size,
                        derive_seed(config.master_seed, {0xb6, 6}));
        const Matrix explained = sample_rows(ctx->test.values, config.explain_rows,
                                             derive_seed(config.master_seed, {0xe7, 7}));
        const ShapMatrix shap = explain_rows(model, explained, background);
        write_global_csv(out_dir + "/shap_global.csv", global_importance(shap));
        write_local_csv(out_dir + "/shap_local.csv", local_summary(shap, explained));
        {
            json meta = {{"model", to_string(target)},
                         {"base_value", shap.base_value},
                         {"rows", explained.rows()},
                         {"background_rows", background.rows()}};
            std::ofstream(out_dir + "/shap_meta.json") << meta.dump(2) << '\n';
        }
        log.done(stage);

        stage = "report";
        write_manifest(out_dir, config, ctx.get(), log, "");
        std::ofstream(out_dir + "/report.md") << emit_report(out_dir);
        log.done(stage);
        write_manifest(out_dir, config, ctx.get(), log, "");
        return artifacts;
    } catch (const std::exception&) {
        write_manifest(out_dir, config, ctx.get(), log, stage);
        throw;
    }
}

std::string emit_report(const std::string& out_dir) {
    const auto table = read_comparison_csv(out_dir + "/comparison_table.csv");
    if (table.empty()) throw DataError("comparison table is empty");
    const std::size_t best = best_model_index(table);

    const auto fmt = [](const std::optional<double>& v) {
        if (!v) return std::string("undefined");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", *v);
        return std::string(buf);
    };

    std::ostringstream out;
    out << "# Run report\n\n";
    out << "## Model comparison (held-out test set)\n\n";
    out << "| Model | Accuracy | Precision | Recall | F1 | AUC |\n";
    out << "|---|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << "| " << to_string(table[i].kind) << (i == best ? " **(best)**" : "")
            << " | " << fmt(table[i].metrics.accuracy) << " | "
            << fmt(table[i].metrics.precision) << " | " << fmt(table[i].metrics.recall)
            << " | " << fmt(table[i].metrics.f1) << " | " << fmt(table[i].metrics.auc)
            << " |\n";
    }
    out << "\nBest model: **" << to_string(table[best].kind)
        << "** (max recall, ties broken by AUC).\n";

    const std::string shap_path = out_dir + "/shap_global.csv";
    if (fs::exists(shap_path)) {
        std::string explained_model;
        const std::string meta_path = out_dir + "/shap_meta.json";
        if (fs::exists(meta_path)) {
            std::ifstream in(meta_path);
            std::stringstream ss;
            ss << in.rdbuf();
            explained_model = json::parse(ss.str()).value("model", "");
        }
        out << "\n## Top features by mean |SHAP|";
        if (!explained_model.empty()) out << " (" << explained_model << ")";
        out << "\n\n";
        const csv::Table shap_table = csv::read_file(shap_path);
        const std::size_t limit = std::min<std::size_t>(10, shap_table.rows.size());
        for (std::size_t i = 0; i < limit; ++i) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6f", std::stod(shap_table.rows[i][1]));
            out << (i + 1) << ". " << shap_table.rows[i][0] << " — " << buf << "\n";
        }
    }
    return out.str();
}

}  // namespace crashsev
