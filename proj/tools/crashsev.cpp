// crashsev — crash injury severity classification pipeline CLI.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "crashsev/pipeline.hpp"

namespace fs = std::filesystem;
using namespace crashsev;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitModel = 4;

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> models;
    std::string scoring;
    bool no_smote = false;
    std::optional<int> smote_k;
    std::optional<double> smote_ratio;
};

RunConfig load_config(const CommonFlags& flags) {
    if (flags.config_path.empty()) throw ConfigError("--config is required");
    RunConfig config = RunConfig::from_json_file(flags.config_path);
    if (flags.seed) config.master_seed = *flags.seed;
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    if (!flags.models.empty()) {
        config.models.clear();
        for (const auto& name : flags.models) {
            config.models.push_back(model_kind_from_string(name));
        }
    }
    if (!flags.scoring.empty()) config.scoring = flags.scoring;
    if (flags.no_smote) config.smote_enabled = false;
    if (flags.smote_k) config.smote_k = *flags.smote_k;
    if (flags.smote_ratio) config.smote_ratio = *flags.smote_ratio;
    config.validate();
    return config;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "run configuration JSON");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "override the master seed");
    cmd->add_option("--models", flags.models, "model subset (comma separated)")
        ->delimiter(',');
    cmd->add_option("--scoring", flags.scoring, "tuning metric: auc/accuracy/recall/f1");
    cmd->add_flag("--no-smote", flags.no_smote, "disable SMOTE resampling");
    cmd->add_option("--smote-k", flags.smote_k, "SMOTE neighbor count");
    cmd->add_option("--smote-ratio", flags.smote_ratio,
                    "SMOTE minority/majority target ratio");
}

FeatureSchema load_schema_arg(const std::string& path) {
    if (path.empty() || path == "builtin") return FeatureSchema::crash_default();
    return FeatureSchema::from_json_file(path);
}

std::optional<SmoteConfig> smote_of(const RunConfig& config) {
    if (!config.smote_enabled) return std::nullopt;
    return SmoteConfig{config.smote_k, config.smote_ratio,
                       derive_seed(config.master_seed, {0x5304e, 5})};
}

int run_dispatch(CLI::App& app, const CommonFlags& flags,
                 const std::string& schema_path, std::size_t synth_n,
                 double synth_rate, const std::string& synth_out,
                 const std::string& effects_path, std::uint64_t synth_seed,
                 const std::string& ingest_csv, const std::string& explain_model) {
    if (app.got_subcommand("synth")) {
        const FeatureSchema schema = load_schema_arg(schema_path);
        EffectTable effects;
        if (!effects_path.empty()) {
            std::ifstream in(effects_path);
            if (!in) throw ConfigError("cannot open effects file: " + effects_path);
            std::stringstream ss;
            ss << in.rdbuf();
            effects = EffectTable::from_json_text(ss.str());
        }
        const Dataset dataset =
            synth_generate(schema, synth_n, synth_rate, effects, synth_seed);
        write_dataset_csv(synth_out, dataset);
        std::int64_t positives = 0;
        for (int label : dataset.labels) positives += label;
        std::cout << "wrote " << dataset.n_rows() << " rows to " << synth_out
                  << " (positive share "
                  << static_cast<double>(positives) / static_cast<double>(dataset.n_rows())
                  << ")\n";
        return kExitOk;
    }

    if (app.got_subcommand("ingest")) {
        const FeatureSchema schema = load_schema_arg(schema_path);
        const auto loaded = load_csv(ingest_csv, schema);
        const std::string out_dir = flags.out_dir.empty() ? "out" : flags.out_dir;
        fs::create_directories(out_dir);
        const Encoder encoder = Encoder::fit(loaded.dataset);
        const DesignMatrix encoded = encoder.transform(loaded.dataset);
        write_design_matrix_csv(out_dir + "/encoded.csv", encoded);
        std::cout << "rows kept: " << loaded.dataset.n_rows()
                  << ", dropped: " << loaded.dropped_rows
                  << ", encoded columns: " << encoded.n_cols() << '\n';
        for (const auto& warning : encoder.warnings()) {
            std::cerr << "warning: " << warning << '\n';
        }
        std::cout << "encoded matrix written to " << out_dir << "/encoded.csv\n";
        return kExitOk;
    }

    if (app.got_subcommand("report")) {
        std::cout << emit_report(flags.out_dir.empty() ? "out" : flags.out_dir);
        return kExitOk;
    }

    const RunConfig config = load_config(flags);
    const std::string out_dir = config.output_dir;
    fs::create_directories(out_dir);

    if (app.got_subcommand("select")) {
        const PipelineContext ctx = prepare(config);
        write_selection_csv(out_dir + "/selection_report.csv", ctx.selection_fit,
                            ctx.selection);
        std::cout << "kept " << ctx.selection.kept.size() << " of "
                  << (ctx.selection.kept.size() + ctx.selection.dropped.size())
                  << " columns at alpha=" << config.selection_alpha << ":\n";
        for (const auto& name : ctx.selection.kept) std::cout << "  " << name << '\n';
        std::cout << "report written to " << out_dir << "/selection_report.csv\n";
        return kExitOk;
    }

    if (app.got_subcommand("tune") || app.got_subcommand("train")) {
        const bool fit_after = app.got_subcommand("train");
        const PipelineContext ctx = prepare(config);
        const auto smote_config = smote_of(config);
        for (ModelKind kind : config.models) {
            const auto grid_it = config.grids.find(to_string(kind));
            const Grid grid =
                grid_it != config.grids.end() ? grid_it->second : Grid::defaults(kind);
            const TuneResult tuned =
                grid_search(kind, grid, ctx.train, config.cv_folds, config.scoring,
                            smote_config,
                            derive_seed(config.master_seed,
                                        {0x70e3, static_cast<std::uint64_t>(kind)}));
            std::ofstream(out_dir + "/tune_" + to_string(kind) + ".json")
                << tuned.to_json_text() << '\n';
            std::cout << to_string(kind) << " best parameters:";
            for (const auto& [key, value] : tuned.best_params.values()) {
                std::cout << ' ' << key << '=';
                if (const auto* s = std::get_if<std::string>(&value)) std::cout << *s;
                else std::cout << std::get<double>(value);
            }
            std::cout << "  (mean " << config.scoring << ' '
                      << tuned.cells[tuned.best_index].mean_score << ")\n";
            if (fit_after) {
                DesignMatrix fit_matrix = ctx.train;
                if (smote_config) {
                    SmoteConfig refit = *smote_config;
                    refit.seed = derive_seed(config.master_seed,
                                             {0xef17, static_cast<std::uint64_t>(kind)});
                    fit_matrix = smote(fit_matrix, refit);
                }
                const FittedModel model =
                    fit_model(kind, tuned.best_params, fit_matrix,
                              derive_seed(config.master_seed,
                                          {0xf17, static_cast<std::uint64_t>(kind)}));
                save_model(out_dir + "/model_" + to_string(kind) + ".json", model);
                std::cout << "  model written to " << out_dir << "/model_"
                          << to_string(kind) << ".json\n";
            }
        }
        return kExitOk;
    }

    if (app.got_subcommand("evaluate")) {
        const PipelineContext ctx = prepare(config);
        std::vector<ModelResult> table;
        for (ModelKind kind : config.models) {
            const std::string path = out_dir + "/model_" + to_string(kind) + ".json";
            if (!fs::exists(path)) {
                throw DataError("missing trained model (run `train` first): " + path);
            }
            const FittedModel model = load_model(path);
            const auto proba = predict_proba(model, ctx.test);
            std::vector<int> pred(proba.size());
            for (std::size_t i = 0; i < proba.size(); ++i) {
                pred[i] = proba[i] >= 0.5 ? 1 : 0;
            }
            ModelResult result;
            result.kind = kind;
            result.confusion = confusion_counts(ctx.test.labels, pred);
            result.metrics = score_set(result.confusion);
            const RocCurve curve = roc_curve(ctx.test.labels, proba);
            result.metrics.auc = auc(curve);
            write_roc_csv(out_dir + "/roc_" + to_string(kind) + ".csv", curve);
            table.push_back(std::move(result));
        }
        write_comparison_csv(out_dir + "/comparison_table.csv", table);
        std::cout << emit_report(out_dir);
        return kExitOk;
    }

    if (app.got_subcommand("explain")) {
        const PipelineContext ctx = prepare(config);
        std::string target = explain_model.empty() ? config.explain_target : explain_model;
        if (target == "best") {
            const std::string table_path = out_dir + "/comparison_table.csv";
            if (!fs::exists(table_path)) {
                throw DataError("explain target 'best' needs " + table_path +
                                " (run `evaluate` first) or an explicit --model");
            }
            const auto table = read_comparison_csv(table_path);
            target = to_string(table[best_model_index(table)].kind);
        }
        const std::string model_path = out_dir + "/model_" + target + ".json";
        if (!fs::exists(model_path)) {
            throw DataError("missing trained model (run `train` first): " + model_path);
        }
        const FittedModel model = load_model(model_path);

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
            sample_rows(ctx.train.values, config.background_size,
                        derive_seed(config.master_seed, {0xb6, 6}));
        const Matrix rows = sample_rows(ctx.test.values, config.explain_rows,
                                        derive_seed(config.master_seed, {0xe7, 7}));
        const ShapMatrix shap = explain_rows(model, rows, background);
        write_global_csv(out_dir + "/shap_global.csv", global_importance(shap));
        write_local_csv(out_dir + "/shap_local.csv", local_summary(shap, rows));
        const auto importance = global_importance(shap);
        std::cout << "explained " << rows.rows() << " rows of " << target
                  << " against " << background.rows()
                  << " background rows (base value " << shap.base_value << ")\n";
        const std::size_t limit = std::min<std::size_t>(10, importance.entries.size());
        for (std::size_t i = 0; i < limit; ++i) {
            std::cout << "  " << (i + 1) << ". " << importance.entries[i].first << "  "
                      << importance.entries[i].second << '\n';
        }
        return kExitOk;
    }

    if (app.got_subcommand("run")) {
        run_pipeline(config, out_dir);
        std::cout << emit_report(out_dir);
        std::cout << "\nartifacts written to " << out_dir << "/\n";
        return kExitOk;
    }

    std::cerr << app.help();
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crash injury severity classification pipeline"};
    app.require_subcommand(0, 1);

    CommonFlags flags;
    std::string schema_path, synth_out = "synth.csv", effects_path, ingest_csv;
    std::string explain_model;
    std::size_t synth_n = 4520;
    double synth_rate = 0.12;
    std::uint64_t synth_seed = 1;

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset CSV");
    synth->add_option("--schema", schema_path, "schema JSON ('builtin' or a path)");
    synth->add_option("--n", synth_n, "number of rows");
    synth->add_option("--positive-rate", synth_rate, "target positive share");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--effects", effects_path, "JSON of feature=level log-odds shifts");
    synth->add_option("--out", synth_out, "output CSV path");

    auto* ingest = app.add_subcommand("ingest", "load a CSV and dump the encoded matrix");
    ingest->add_option("--schema", schema_path, "schema JSON ('builtin' or a path)");
    ingest->add_option("--csv", ingest_csv, "input CSV")->required();
    ingest->add_option("--out", flags.out_dir, "output directory");

    auto* select = app.add_subcommand("select", "fit the selection logit and report");
    add_common(select, flags);

    auto* tune = app.add_subcommand("tune", "grid-search each configured model");
    add_common(tune, flags);

    auto* train = app.add_subcommand("train", "tune and fit each configured model");
    add_common(train, flags);

    auto* evaluate = app.add_subcommand("evaluate", "score trained models on the test set");
    add_common(evaluate, flags);

    auto* explain = app.add_subcommand("explain", "Shapley attributions for one model");
    add_common(explain, flags);
    explain->add_option("--model", explain_model, "model kind to explain");

    auto* run = app.add_subcommand("run", "full pipeline end to end");
    add_common(run, flags);

    auto* report = app.add_subcommand("report", "render the report for a run directory");
    report->add_option("--out", flags.out_dir, "run directory");

    (void)select;
    (void)tune;
    (void)train;
    (void)evaluate;
    (void)run;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        return run_dispatch(app, flags, schema_path, synth_n, synth_rate, synth_out,
                            effects_path, synth_seed, ingest_csv, explain_model);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return kExitModel;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitModel;
    }
}
