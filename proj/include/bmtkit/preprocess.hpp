#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bmtkit/dataset.hpp"

namespace bmt {

// Fill values learned from a dataset: mean for numeric columns, most frequent
// level for categorical ones (ties broken by lexicographically smallest).
struct impute_plan {
  std::map<std::string, double> numeric_fill;
  std::map<std::string, std::string> categorical_fill;

  bool covers(const std::string& column) const {
    return numeric_fill.count(column) || categorical_fill.count(column);
  }
};

// Drop-first dummy encoding: each categorical column keeps every level except
// the lexicographically smallest (the baseline), emitting one 0/1 column per
// kept level named "<col>_<level>".  Numeric columns pass through unchanged.
struct encoding_map {
  struct column_encoding {
    std::string column;
    std::string baseline;
    std::vector<std::string> kept_levels;  // sorted
  };
  std::vector<std::string> numeric_passthrough;  // original order
  std::vector<column_encoding> encodings;        // original column order
  std::vector<std::string> warnings;             // single-level columns etc.

  std::vector<std::string> output_names() const;
};

struct design_matrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;  // row-major
  std::vector<std::string> column_names;
  std::vector<int> labels;  // 0/1, empty when the matrix carries no target
  std::string positive_level;
  std::vector<std::string> warnings;

  double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * n_cols + c]; }
  const double* row(std::size_t r) const { return values.data() + r * n_cols; }
  std::size_t col_index(const std::string& name) const;  // throws if absent
};

// Per-column standardization parameters fitted on training rows: center is
// the mean, scale the population (divisor n) standard deviation, 1.0 when the
// column is constant.
struct scaler_params {
  std::vector<std::string> columns;
  std::vector<double> center;
  std::vector<double> scale;
};

struct split_indices {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  std::uint64_t seed = 0;
};

impute_plan fit_imputer(const dataset& ds);
dataset apply_imputer(const dataset& ds, const impute_plan& plan);

// Skips ds.target_column (when set); requires an imputed dataset.
encoding_map fit_encoding(const dataset& ds);
// Labels map target cells equal to positive_level to 1, every other level to
// 0.  Unseen levels at apply time encode as an all-zero block with a warning.
design_matrix apply_encoding(const dataset& ds, const encoding_map& map,
                             const std::string& target,
                             const std::string& positive_level);

// columns empty means every column
scaler_params fit_scaler(const design_matrix& m,
                         const std::vector<std::string>& columns = {});
design_matrix apply_scaler(const design_matrix& m, const scaler_params& params);

design_matrix take_rows(const design_matrix& m, const std::vector<std::size_t>& rows);
design_matrix take_columns(const design_matrix& m,
                           const std::vector<std::size_t>& cols);

// Stratified split with |test| = ceiling(ratio * n); per-class test counts
// differ from ratio * class_size by less than one.
split_indices train_test_split(std::size_t n_rows, double ratio, std::uint64_t seed,
                               const std::vector<int>& labels);

}  // namespace bmt
