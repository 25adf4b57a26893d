#include "crashsev/schema.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "crashsev/csv.hpp"
#include "crashsev/stats.hpp"

namespace crashsev {

using nlohmann::json;

void FeatureSchema::validate() const {
    std::set<std::string> seen;
    if (features.empty()) throw ConfigError("schema declares no features");
    for (const auto& f : features) {
        if (f.name.empty()) throw ConfigError("schema feature with empty name");
        if (!seen.insert(f.name).second) {
            throw ConfigError("duplicate feature name: " + f.name);
        }
        if (f.is_categorical()) {
            const auto& c = f.categorical();
            if (c.levels.size() < 2) {
                throw ConfigError("categorical feature '" + f.name +
                                  "' needs at least 2 levels");
            }
            std::set<std::string> lv(c.levels.begin(), c.levels.end());
            if (lv.size() != c.levels.size()) {
                throw ConfigError("duplicate levels in feature '" + f.name + "'");
            }
            if (!c.weights.empty() && c.weights.size() != c.levels.size()) {
                throw ConfigError("feature '" + f.name +
                                  "': weights must match level count");
            }
            for (double w : c.weights) {
                if (!(w >= 0.0)) {
                    throw ConfigError("feature '" + f.name + "': negative weight");
                }
            }
        } else {
            const auto& c = f.continuous();
            if (!(c.min < c.max)) {
                throw ConfigError("feature '" + f.name + "': min must be < max");
            }
            if (c.bins) {
                const auto& b = *c.bins;
                if (b.labels.size() != b.edges.size() + 1) {
                    throw ConfigError("feature '" + f.name +
                                      "': need edges+1 bin labels");
                }
                for (std::size_t i = 1; i < b.edges.size(); ++i) {
                    if (!(b.edges[i - 1] < b.edges[i])) {
                        throw ConfigError("feature '" + f.name +
                                          "': bin edges must be strictly increasing");
                    }
                }
                if (b.edges.empty()) {
                    throw ConfigError("feature '" + f.name + "': empty bin edges");
                }
            }
        }
    }
    if (target.name.empty() || seen.count(target.name)) {
        throw ConfigError("target name must be non-empty and distinct from features");
    }
    if (target.negative_label == target.positive_label) {
        throw ConfigError("target labels must differ");
    }
}

int FeatureSchema::feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

FeatureSpec feature_from_json(const json& j) {
    FeatureSpec spec;
    spec.name = j.at("name").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "categorical") {
        CategoricalSpec c;
        c.levels = j.at("levels").get<std::vector<std::string>>();
        if (j.contains("weights")) c.weights = j.at("weights").get<std::vector<double>>();
        spec.kind = std::move(c);
    } else if (kind == "continuous") {
        ContinuousSpec c;
        c.min = j.at("min").get<double>();
        c.max = j.at("max").get<double>();
        if (j.contains("bins")) {
            BinningRule b;
            b.edges = j.at("bins").at("edges").get<std::vector<double>>();
            b.labels = j.at("bins").at("labels").get<std::vector<std::string>>();
            c.bins = std::move(b);
        }
        spec.kind = std::move(c);
    } else {
        throw ConfigError("unknown feature kind: " + kind);
    }
    return spec;
}

json feature_to_json(const FeatureSpec& f) {
    json j;
    j["name"] = f.name;
    if (f.is_categorical()) {
        j["kind"] = "categorical";
        j["levels"] = f.categorical().levels;
        if (!f.categorical().weights.empty()) j["weights"] = f.categorical().weights;
    } else {
        const auto& c = f.continuous();
        j["kind"] = "continuous";
        j["min"] = c.min;
        j["max"] = c.max;
        if (c.bins) {
            j["bins"] = {{"edges", c.bins->edges}, {"labels", c.bins->labels}};
        }
    }
    return j;
}

}  // namespace

FeatureSchema FeatureSchema::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("schema JSON parse error: ") + e.what());
    }
    FeatureSchema schema;
    try {
        for (const auto& f : j.at("features")) schema.features.push_back(feature_from_json(f));
        const auto& t = j.at("target");
        schema.target.name = t.at("name").get<std::string>();
        schema.target.negative_label = t.at("negative").get<std::string>();
        schema.target.positive_label = t.at("positive").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("schema JSON structure error: ") + e.what());
    }
    schema.validate();
    return schema;
}

FeatureSchema FeatureSchema::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schema file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string FeatureSchema::to_json_text() const {
    json j;
    j["features"] = json::array();
    for (const auto& f : features) j["features"].push_back(feature_to_json(f));
    j["target"] = {{"name", target.name},
                   {"negative", target.negative_label},
                   {"positive", target.positive_label}};
    return j.dump(2);
}

FeatureSchema FeatureSchema::crash_default(bool include_vehicle_year) {
    FeatureSchema s;
    auto cat = [&](std::string name, std::vector<std::string> levels,
                   std::vector<double> weights = {}) {
        FeatureSpec f;
        f.name = std::move(name);
        CategoricalSpec c;
        c.levels = std::move(levels);
        c.weights = std::move(weights);
        f.kind = std::move(c);
        s.features.push_back(std::move(f));
    };
    auto cont = [&](std::string name, double mn, double mx,
                    std::optional<BinningRule> bins = std::nullopt) {
        FeatureSpec f;
        f.name = std::move(name);
        ContinuousSpec c;
        c.min = mn;
        c.max = mx;
        c.bins = std::move(bins);
        f.kind = std::move(c);
        s.features.push_back(std::move(f));
    };

    // Level order fixes the dropped reference (first level); orders are chosen
    // so the dummies carry the familiar column names (e.g. the Sober,
    // Heavy_Vehicle, Rear_End, Uncontrolled, Dark_Lighted, Clear, Rural ones).
    cat("driver_gender", {"Male", "Female"}, {0.62, 0.38});
    cat("driver_sobriety_condition", {"Not_Sober", "Sober"}, {0.06, 0.94});
    cont("driver_age", 16.0, 95.0,
         BinningRule{{25.0, 40.0, 50.0, 60.0},
                     {"less_25", "26_40", "41_50", "51_60", "more_60"}});
    cat("aggressive_driving", {"No", "Yes"}, {0.78, 0.22});
    cat("vehicle_type", {"Car", "SUV", "Heavy_Vehicle"}, {0.58, 0.32, 0.10});
    cont("estimated_speed", 0.0, 90.0);
    cat("vehicle_maneuver",
        {"Straight", "Stopped", "Lane_Changing", "Slowing", "Turning", "Other"},
        {0.45, 0.18, 0.14, 0.12, 0.06, 0.05});
    cat("road_surface_condition", {"Dry", "Wet"}, {0.85, 0.15});
    cat("road_alignment", {"Straight", "Curve"}, {0.92, 0.08});
    cat("crash_type", {"Other", "Rear_End", "Sideswipe"}, {0.15, 0.55, 0.30});
    cat("crash_location", {"Not_Intersection", "Intersection"}, {0.86, 0.14});
    cat("season", {"Winter", "Summer", "Spring", "Fall"});
    cat("day_of_week", {"Weekday", "Weekend"}, {0.72, 0.28});
    cat("time_of_day",
        {"Morning_Peak", "Morning_Off_Peak", "Day_Off_Peak", "Night_Off_Peak",
         "Afternoon_Peak"},
        {0.17, 0.12, 0.31, 0.18, 0.22});
    cat("weather_condition", {"Cloudy", "Clear", "Rain"}, {0.18, 0.70, 0.12});
    cat("area_type", {"Urban", "Rural"}, {0.73, 0.27});
    cat("traffic_control", {"Controlled", "Uncontrolled"}, {0.88, 0.12});
    cat("light_condition", {"Daylight", "Dark_Lighted", "Dark_Not_Lighted"},
        {0.66, 0.22, 0.12});
    if (include_vehicle_year) {
        cont("vehicle_year", 0.0, 30.0, BinningRule{{10.0}, {"less_10", "more_10"}});
    }
    s.target = TargetSpec{};
    s.validate();
    return s;
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
    Dataset out;
    out.schema = schema;
    out.columns.reserve(columns.size());
    for (const auto& col : columns) {
        if (std::holds_alternative<std::vector<int>>(col)) {
            const auto& src = std::get<std::vector<int>>(col);
            std::vector<int> dst(indices.size());
            for (std::size_t i = 0; i < indices.size(); ++i) dst[i] = src[indices[i]];
            out.columns.emplace_back(std::move(dst));
        } else {
            const auto& src = std::get<std::vector<double>>(col);
            std::vector<double> dst(indices.size());
            for (std::size_t i = 0; i < indices.size(); ++i) dst[i] = src[indices[i]];
            out.columns.emplace_back(std::move(dst));
        }
    }
    out.labels.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out.labels[i] = labels[indices[i]];
    return out;
}

namespace {

bool is_missing(const std::string& raw) {
    return raw.empty() || raw == "NA" || raw == "N/A" || raw == "?";
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

LoadResult load_csv(const std::string& path, const FeatureSchema& schema) {
    schema.validate();
    const csv::Table table = csv::read_file(path);

    std::vector<int> col_of_feature(schema.features.size(), -1);
    int target_col = -1;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const std::string name = trim(table.header[c]);
        const int fi = schema.feature_index(name);
        if (fi >= 0) col_of_feature[fi] = static_cast<int>(c);
        if (name == schema.target.name) target_col = static_cast<int>(c);
    }
    for (std::size_t fi = 0; fi < schema.features.size(); ++fi) {
        if (col_of_feature[fi] < 0) {
            throw DataError("CSV header lacks schema column: " + schema.features[fi].name);
        }
    }
    if (target_col < 0) {
        throw DataError("CSV header lacks target column: " + schema.target.name);
    }

    LoadResult result;
    result.dataset.schema = schema;
    auto& columns = result.dataset.columns;
    for (const auto& f : schema.features) {
        if (f.is_categorical()) columns.emplace_back(std::vector<int>{});
        else columns.emplace_back(std::vector<double>{});
    }

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t row_number = r + 2;  // 1-based, after the header

        if (row.size() <= static_cast<std::size_t>(target_col)) {
            ++result.dropped_rows;
            continue;
        }
        const std::string target_raw = trim(row[target_col]);
        int label;
        if (target_raw == schema.target.negative_label) {
            label = 0;
        } else if (target_raw == schema.target.positive_label) {
            label = 1;
        } else if (is_missing(target_raw)) {
            ++result.dropped_rows;
            continue;
        } else {
            throw DataError("row " + std::to_string(row_number) +
                            ": target value '" + target_raw +
                            "' outside {" + schema.target.negative_label + ", " +
                            schema.target.positive_label + "}");
        }

        // Parse all schema cells before committing the row.
        std::vector<int> cat_vals;
        std::vector<double> num_vals;
        bool ok = true;
        for (std::size_t fi = 0; fi < schema.features.size() && ok; ++fi) {
            const auto c = static_cast<std::size_t>(col_of_feature[fi]);
            if (c >= row.size()) {
                ok = false;
                break;
            }
            const std::string raw = trim(row[c]);
            if (is_missing(raw)) {
                ok = false;
                break;
            }
            const auto& f = schema.features[fi];
            if (f.is_categorical()) {
                const auto& levels = f.categorical().levels;
                const auto it = std::find(levels.begin(), levels.end(), raw);
                if (it == levels.end()) {
                    ok = false;
                    break;
                }
                cat_vals.push_back(static_cast<int>(it - levels.begin()));
            } else {
                char* end = nullptr;
                const double v = std::strtod(raw.c_str(), &end);
                if (end == raw.c_str() || *end != '\0' || !std::isfinite(v) ||
                    v < f.continuous().min || v > f.continuous().max) {
                    ok = false;
                    break;
                }
                num_vals.push_back(v);
            }
        }
        if (!ok) {
            ++result.dropped_rows;
            continue;
        }

        std::size_t ci = 0, ni = 0;
        for (std::size_t fi = 0; fi < schema.features.size(); ++fi) {
            if (schema.features[fi].is_categorical()) {
                std::get<std::vector<int>>(columns[fi]).push_back(cat_vals[ci++]);
            } else {
                std::get<std::vector<double>>(columns[fi]).push_back(num_vals[ni++]);
            }
        }
        result.dataset.labels.push_back(label);
    }
    return result;
}

void write_dataset_csv(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    for (const auto& f : dataset.schema.features) out << csv::escape(f.name) << ',';
    out << csv::escape(dataset.schema.target.name) << '\n';
    for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
        for (std::size_t fi = 0; fi < dataset.schema.features.size(); ++fi) {
            const auto& f = dataset.schema.features[fi];
            if (f.is_categorical()) {
                const int lvl = std::get<std::vector<int>>(dataset.columns[fi])[r];
                out << csv::escape(f.categorical().levels[lvl]);
            } else {
                out << csv::format_double(
                    std::get<std::vector<double>>(dataset.columns[fi])[r]);
            }
            out << ',';
        }
        out << (dataset.labels[r] == 1 ? dataset.schema.target.positive_label
                                       : dataset.schema.target.negative_label)
            << '\n';
    }
}

void EffectTable::add(const std::string& key, double log_odds) {
    entries_[key] = log_odds;
}

EffectTable EffectTable::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("effects JSON parse error: ") + e.what());
    }
    EffectTable t;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number()) throw ConfigError("effect '" + key + "' must be a number");
        t.add(key, value.get<double>());
    }
    return t;
}

namespace {

// Splits "feature=level"; returns (feature index, level-or-bin index).
std::pair<int, int> resolve_effect_key(const FeatureSchema& schema,
                                       const std::string& key) {
    const auto eq = key.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("effect key '" + key + "' must look like feature=level");
    }
    const std::string feature = key.substr(0, eq);
    const std::string level = key.substr(eq + 1);
    const int fi = schema.feature_index(feature);
    if (fi < 0) throw ConfigError("effect key names unknown feature: " + feature);
    const auto& f = schema.features[fi];
    if (f.is_categorical()) {
        const auto& levels = f.categorical().levels;
        const auto it = std::find(levels.begin(), levels.end(), level);
        if (it == levels.end()) {
            throw ConfigError("effect key '" + key + "' names unknown level");
        }
        return {fi, static_cast<int>(it - levels.begin())};
    }
    if (!f.continuous().bins) {
        throw ConfigError("effect key '" + key +
                          "' targets an unbinned continuous feature");
    }
    const auto& labels = f.continuous().bins->labels;
    const auto it = std::find(labels.begin(), labels.end(), level);
    if (it == labels.end()) {
        throw ConfigError("effect key '" + key + "' names unknown bin");
    }
    return {fi, static_cast<int>(it - labels.begin())};
}

}  // namespace

void EffectTable::validate(const FeatureSchema& schema) const {
    for (const auto& [key, unused] : entries_) {
        (void)unused;
        resolve_effect_key(schema, key);
    }
}

int bin_index(const BinningRule& rule, double v) {
    for (std::size_t i = 0; i < rule.edges.size(); ++i) {
        if (v <= rule.edges[i]) return static_cast<int>(i);
    }
    return static_cast<int>(rule.edges.size());
}

Dataset synth_generate(const FeatureSchema& schema, std::size_t n, double positive_rate,
                       const EffectTable& effects, std::uint64_t seed) {
    schema.validate();
    if (!(positive_rate > 0.0 && positive_rate < 1.0)) {
        throw ConfigError("positive_rate must lie in (0,1)");
    }
    if (n == 0) throw ConfigError("synth_generate: n must be positive");
    effects.validate(schema);

    // Resolve effects to (feature, level/bin) -> shift for fast row lookup.
    std::vector<std::map<int, double>> shift(schema.features.size());
    for (const auto& [key, value] : effects.entries()) {
        const auto [fi, li] = resolve_effect_key(schema, key);
        shift[fi][li] += value;
    }

    Dataset out;
    out.schema = schema;
    for (const auto& f : schema.features) {
        if (f.is_categorical()) out.columns.emplace_back(std::vector<int>(n));
        else out.columns.emplace_back(std::vector<double>(n));
    }

    Rng rng(derive_seed(seed, {0x5e47a, 1}));
    std::vector<double> row_shift(n, 0.0);
    for (std::size_t fi = 0; fi < schema.features.size(); ++fi) {
        const auto& f = schema.features[fi];
        if (f.is_categorical()) {
            const auto& c = f.categorical();
            std::vector<double> cdf(c.levels.size());
            double total = 0.0;
            for (std::size_t l = 0; l < c.levels.size(); ++l) {
                total += c.weights.empty() ? 1.0 : c.weights[l];
                cdf[l] = total;
            }
            auto& col = std::get<std::vector<int>>(out.columns[fi]);
            for (std::size_t r = 0; r < n; ++r) {
                const double u = rng.uniform() * total;
                int lvl = 0;
                while (lvl + 1 < static_cast<int>(cdf.size()) && u >= cdf[lvl]) ++lvl;
                col[r] = lvl;
                const auto it = shift[fi].find(lvl);
                if (it != shift[fi].end()) row_shift[r] += it->second;
            }
        } else {
            const auto& c = f.continuous();
            auto& col = std::get<std::vector<double>>(out.columns[fi]);
            for (std::size_t r = 0; r < n; ++r) {
                const double v = c.min + rng.uniform() * (c.max - c.min);
                col[r] = v;
                if (c.bins && !shift[fi].empty()) {
                    const auto it = shift[fi].find(bin_index(*c.bins, v));
                    if (it != shift[fi].end()) row_shift[r] += it->second;
                }
            }
        }
    }

    // One uniform per row, drawn once; the label is u < sigmoid(c + shift),
    // so the realized positive share is a monotone step function of the
    // intercept c and bisection can hit the ±0.02 window exactly.
    std::vector<double> u(n);
    for (std::size_t r = 0; r < n; ++r) u[r] = rng.uniform();

    const auto share_at = [&](double intercept) {
        std::size_t pos = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (u[r] < sigmoid(intercept + row_shift[r])) ++pos;
        }
        return static_cast<double>(pos) / static_cast<double>(n);
    };

    const double tolerance = 0.02;
    double lo = -40.0, hi = 40.0;
    double best_intercept = 0.0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double share = share_at(mid);
        const double gap = std::fabs(share - positive_rate);
        if (gap < best_gap) {
            best_gap = gap;
            best_intercept = mid;
        }
        if (gap <= tolerance && it >= 20) break;  // settle near the target first
        if (share < positive_rate) lo = mid;
        else hi = mid;
    }
    if (best_gap > tolerance) {
        throw ModelError("synth_generate: positive_rate unreachable after 100 bisection "
                         "iterations (closest share differs by " +
                         std::to_string(best_gap) + ")");
    }

    out.labels.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        out.labels[r] = u[r] < sigmoid(best_intercept + row_shift[r]) ? 1 : 0;
    }
    return out;
}

SplitPair stratified_split(const Dataset& dataset, double test_fraction,
                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("test_fraction must lie in (0,1)");
    }
    const std::size_t n = dataset.n_rows();
    std::vector<std::size_t> neg, pos;
    for (std::size_t i = 0; i < n; ++i) {
        (dataset.labels[i] == 1 ? pos : neg).push_back(i);
    }
    if (neg.size() < 2 || pos.size() < 2) {
        throw DataError("stratified_split: each class needs at least 2 rows");
    }

    std::size_t total_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(n)));
    total_test = std::clamp<std::size_t>(total_test, 1, n - 1);

    // Largest-remainder allocation of the test quota across the two classes.
    const double exact_neg = test_fraction * static_cast<double>(neg.size());
    const double exact_pos = test_fraction * static_cast<double>(pos.size());
    std::size_t t_neg = static_cast<std::size_t>(std::floor(exact_neg));
    std::size_t t_pos = static_cast<std::size_t>(std::floor(exact_pos));
    while (t_neg + t_pos < total_test) {
        const double r_neg = exact_neg - static_cast<double>(t_neg);
        const double r_pos = exact_pos - static_cast<double>(t_pos);
        if (r_neg > r_pos || (r_neg == r_pos && neg.size() >= pos.size())) ++t_neg;
        else ++t_pos;
    }
    t_neg = std::min(t_neg, neg.size());
    t_pos = std::min(t_pos, pos.size());

    Rng rng(derive_seed(seed, {0x511f7, 2}));
    rng.shuffle(neg);
    rng.shuffle(pos);

    SplitPair split;
    split.seed = seed;
    split.test_fraction = test_fraction;
    split.test_indices.assign(neg.begin(), neg.begin() + t_neg);
    split.test_indices.insert(split.test_indices.end(), pos.begin(), pos.begin() + t_pos);
    split.train_indices.assign(neg.begin() + t_neg, neg.end());
    split.train_indices.insert(split.train_indices.end(), pos.begin() + t_pos, pos.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    std::sort(split.train_indices.begin(), split.train_indices.end());
    split.train = dataset.select_rows(split.train_indices);
    split.test = dataset.select_rows(split.test_indices);
    return split;
}

}  // namespace crashsev
