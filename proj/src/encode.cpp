#include "crashsev/encode.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "crashsev/csv.hpp"

namespace crashsev {

DesignMatrix DesignMatrix::select_rows(std::span<const std::size_t> indices) const {
    DesignMatrix out;
    out.column_names = column_names;
    out.values = values.select_rows(indices);
    out.labels.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out.labels[i] = labels[indices[i]];
    return out;
}

DesignMatrix DesignMatrix::select_columns(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& name : names) {
        const auto it = std::find(column_names.begin(), column_names.end(), name);
        if (it == column_names.end()) {
            throw DataError("design matrix lacks column: " + name);
        }
        idx.push_back(static_cast<std::size_t>(it - column_names.begin()));
    }
    DesignMatrix out;
    out.column_names = names;
    out.values = values.select_cols(idx);
    out.labels = labels;
    return out;
}

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    }
    return out;
}

}  // namespace

Encoder Encoder::fit(const Dataset& train) {
    if (train.n_rows() == 0) throw DataError("encode: empty dataset");
    train.schema.validate();

    Encoder enc;
    enc.schema_ = train.schema;
    const std::size_t n = train.n_rows();

    for (std::size_t fi = 0; fi < train.schema.features.size(); ++fi) {
        const auto& f = train.schema.features[fi];
        if (f.is_categorical()) {
            const auto& levels = f.categorical().levels;
            const auto& col = std::get<std::vector<int>>(train.columns[fi]);
            for (int v : col) {
                if (v < 0 || v >= static_cast<int>(levels.size())) {
                    throw DataError("feature '" + f.name +
                                    "': level index outside schema");
                }
            }
            // First level is the reference and gets no column.
            for (std::size_t l = 1; l < levels.size(); ++l) {
                const bool present = std::any_of(col.begin(), col.end(), [&](int v) {
                    return v == static_cast<int>(l);
                });
                const std::string name = f.name + "_" + sanitize(levels[l]);
                if (!present) {
                    enc.warnings_.push_back("dropping all-zero column " + name +
                                            " (level absent from training data)");
                    continue;
                }
                enc.plan_.push_back({ColumnPlan::Kind::OneHot, fi,
                                     static_cast<int>(l), 0.0, 1.0});
                enc.column_names_.push_back(name);
            }
        } else if (f.continuous().bins) {
            const auto& rule = *f.continuous().bins;
            const auto& col = std::get<std::vector<double>>(train.columns[fi]);
            for (std::size_t b = 1; b < rule.labels.size(); ++b) {
                const bool present = std::any_of(col.begin(), col.end(), [&](double v) {
                    return bin_index(rule, v) == static_cast<int>(b);
                });
                const std::string name = f.name + "_" + sanitize(rule.labels[b]);
                if (!present) {
                    enc.warnings_.push_back("dropping all-zero column " + name +
                                            " (bin empty on training data)");
                    continue;
                }
                enc.plan_.push_back({ColumnPlan::Kind::Bin, fi, static_cast<int>(b),
                                     0.0, 1.0});
                enc.column_names_.push_back(name);
            }
        } else {
            const auto& col = std::get<std::vector<double>>(train.columns[fi]);
            double mean = 0.0;
            for (double v : col) mean += v;
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (double v : col) var += (v - mean) * (v - mean);
            var /= static_cast<double>(n);
            double sd = std::sqrt(var);
            if (sd <= 1e-12) {
                // Denominator clamps to 1 so the column would be all zeros.
                enc.warnings_.push_back("dropping constant continuous column " + f.name);
                continue;
            }
            enc.plan_.push_back({ColumnPlan::Kind::Standardize, fi, 0, mean, sd});
            enc.column_names_.push_back(f.name);
        }
    }
    if (enc.plan_.empty()) throw DataError("encode: no usable columns");
    return enc;
}

DesignMatrix Encoder::transform(const Dataset& dataset) const {
    if (dataset.n_rows() == 0) throw DataError("encode: empty dataset");
    if (dataset.schema.features.size() != schema_.features.size()) {
        throw DataError("encode: dataset schema does not match the fitted schema");
    }
    const std::size_t n = dataset.n_rows();

    DesignMatrix out;
    out.column_names = column_names_;
    out.values = Matrix(n, plan_.size());
    out.labels = dataset.labels;

    for (std::size_t j = 0; j < plan_.size(); ++j) {
        const auto& p = plan_[j];
        const auto& f = schema_.features[p.feature];
        switch (p.kind) {
            case ColumnPlan::Kind::OneHot: {
                const auto& col = std::get<std::vector<int>>(dataset.columns[p.feature]);
                const int n_levels = static_cast<int>(f.categorical().levels.size());
                for (std::size_t r = 0; r < n; ++r) {
                    if (col[r] < 0 || col[r] >= n_levels) {
                        throw DataError("feature '" + f.name +
                                        "': level index outside schema");
                    }
                    out.values.at(r, j) = col[r] == p.level ? 1.0 : 0.0;
                }
                break;
            }
            case ColumnPlan::Kind::Bin: {
                const auto& col =
                    std::get<std::vector<double>>(dataset.columns[p.feature]);
                const auto& rule = *f.continuous().bins;
                for (std::size_t r = 0; r < n; ++r) {
                    out.values.at(r, j) = bin_index(rule, col[r]) == p.level ? 1.0 : 0.0;
                }
                break;
            }
            case ColumnPlan::Kind::Standardize: {
                const auto& col =
                    std::get<std::vector<double>>(dataset.columns[p.feature]);
                for (std::size_t r = 0; r < n; ++r) {
                    out.values.at(r, j) = (col[r] - p.mean) / p.sd;
                }
                break;
            }
        }
    }
    return out;
}

DesignMatrix encode(const Dataset& dataset) {
    return Encoder::fit(dataset).transform(dataset);
}

void write_design_matrix_csv(const std::string& path, const DesignMatrix& m) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    for (const auto& name : m.column_names) out << csv::escape(name) << ',';
    out << "label\n";
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        for (std::size_t c = 0; c < m.n_cols(); ++c) {
            out << csv::format_double(m.values.at(r, c)) << ',';
        }
        out << m.labels[r] << '\n';
    }
}

}  // namespace crashsev
