#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <bmtkit/rng.hpp>

namespace bmt {

// Non-owning row-major view. Learners take this so the same code runs on a
// full design matrix, a fold slice, or a two-row toy example.
struct data_view {
  const double* values = nullptr;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;

  double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
  const double* row(std::size_t r) const { return values + r * n_cols; }
};

struct dense_matrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;

  dense_matrix() = default;
  dense_matrix(std::size_t rows, std::size_t cols)
      : n_rows(rows), n_cols(cols), values(rows * cols, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * n_cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
  data_view view() const { return {values.data(), n_rows, n_cols}; }
};

// One node of a binary partition tree. Internal nodes route x[feature] <=
// threshold to left and the rest to right; leaves carry a value (class
// probability for classification trees, an additive weight for boosting).
struct tree_node {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

using tree = std::vector<tree_node>;

double tree_value(const tree& t, const double* row);

// impurity of a binary node as a function of its positive fraction
double gini_impurity(double p);
double entropy_impurity(double p);

struct class_tree_params {
  std::size_t max_depth = 0;  // 0 means unbounded
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  bool use_entropy = false;
  std::size_t max_features = 0;  // 0 means all; otherwise sampled per node
  rng* gen = nullptr;            // required when max_features is in effect
};

// Greedy CART on the given rows (duplicates allowed, e.g. bootstrap
// samples). Thresholds are midpoints between consecutive distinct sorted
// values; the best split is taken even at zero gain so patterns like XOR
// still resolve at depth 2. Optional per-row weights feed both the impurity
// and the leaf values (AdaBoost).
tree fit_class_tree(data_view X, const std::vector<int>& y,
                    const std::vector<std::uint32_t>& rows,
                    const std::vector<double>* weights,
                    const class_tree_params& p);

struct reg_tree_params {
  std::size_t max_depth = 3;
  std::size_t min_samples_leaf = 1;
};

// Variance-reduction regression tree over the given rows; leaf values come
// from the callback so boosting can apply its Newton step.
tree fit_reg_tree(data_view X, const std::vector<double>& target,
                  const std::vector<std::uint32_t>& rows,
                  const reg_tree_params& p,
                  const std::function<double(const std::vector<std::uint32_t>&)>&
                      leaf_value);

struct xgb_tree_params {
  std::size_t max_depth = 6;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
};

// Second-order tree: split gain from per-row gradient g and hessian h,
// leaf weight -G/(H+lambda); a node stays a leaf unless some split has
// strictly positive gain and both children carry min_child_weight hessian.
tree fit_xgb_tree(data_view X, const std::vector<double>& g,
                  const std::vector<double>& h,
                  const std::vector<std::uint32_t>& rows,
                  const std::vector<std::uint32_t>& features,
                  const xgb_tree_params& p);

}  // namespace bmt
