#pragma once

#include <string>
#include <vector>

#include "crashsev/core.hpp"
#include "crashsev/schema.hpp"

namespace crashsev {

struct DesignMatrix {
    std::vector<std::string> column_names;
    Matrix values;            // n × p
    std::vector<int> labels;  // n entries of {0,1}

    std::size_t n_rows() const { return values.rows(); }
    std::size_t n_cols() const { return values.cols(); }
    DesignMatrix select_rows(std::span<const std::size_t> indices) const;
    DesignMatrix select_columns(const std::vector<std::string>& names) const;
};

// One-hot encodes categoricals (first level is the dropped reference), turns
// binned continuous features into bin indicators (first bin dropped), and
// standardizes the remaining continuous features with statistics taken from
// the fitted (training) dataset. Columns that come out all-zero on the
// training data are removed with a warning.
class Encoder {
public:
    static Encoder fit(const Dataset& train);

    DesignMatrix transform(const Dataset& dataset) const;

    const std::vector<std::string>& column_names() const { return column_names_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    struct ColumnPlan {
        enum class Kind { OneHot, Bin, Standardize } kind;
        std::size_t feature;  // index into schema.features
        int level = 0;        // level or bin index (OneHot/Bin)
        double mean = 0.0;    // Standardize
        double sd = 1.0;
    };

    FeatureSchema schema_;
    std::vector<ColumnPlan> plan_;
    std::vector<std::string> column_names_;
    std::vector<std::string> warnings_;
};

/// fit + transform on the same dataset.
DesignMatrix encode(const Dataset& dataset);

/// Debug dump: header of column names plus "label", then the rows.
void write_design_matrix_csv(const std::string& path, const DesignMatrix& m);

}  // namespace crashsev
