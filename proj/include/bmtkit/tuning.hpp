#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmtkit/learners.hpp"

namespace bmt {

// candidate values per hyperparameter name; std::map keeps names sorted,
// which fixes the expansion order below
using param_grid = std::map<std::string, std::vector<hp_value>>;

// Stratified k-fold assignment: indices are shuffled within each class and
// dealt round-robin through one cursor shared across classes, so fold sizes
// differ by at most one and each fold's class counts sit within one of the
// proportional share.  A class smaller than k forces a plain unstratified
// deal, reported through `warnings`.  Fold index lists come back sorted.
std::vector<std::vector<std::size_t>> kfold_indices(
    std::size_t n, std::size_t k, const std::vector<int>& labels,
    std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

// Cartesian product, first (alphabetically) parameter varying slowest.
// An empty grid means "algorithm defaults": a single empty config.
std::vector<hp_map> expand_grid(const param_grid& grid);

struct cv_result {
  hp_map config;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
  double std_score = 0.0;  // population deviation of the fold scores
  double fit_time_seconds = 0.0;
};

struct search_outcome {
  hp_map best_config;
  std::size_t best_index = 0;  // into results, earliest maximal mean
  std::vector<cv_result> results;  // grid expansion order
  double total_seconds = 0.0;
};

// Exhaustive cross-validated search over the expanded grid.  Every config
// is scored on every fold exactly once; the scheduler (n_threads > 1 fans
// the config x fold jobs over a worker pool) cannot change any reported
// score, only the timing fields.  A fit failure anywhere aborts the whole
// search naming the config and fold.  Scoring accepts "accuracy" only.
search_outcome grid_search(algorithm algo, const param_grid& grid, data_view X,
                           const std::vector<int>& y, std::size_t k,
                           std::uint64_t seed,
                           const std::string& scoring = "accuracy",
                           std::size_t n_threads = 1);

// The stock search space per algorithm, sized to keep a full seven-model
// sweep in the minutes range.  max_depth 0 means unbounded.
param_grid default_grid(algorithm algo);

param_grid grid_from_json(const nlohmann::json& j);
nlohmann::ordered_json grid_to_json(const param_grid& grid);
nlohmann::ordered_json outcome_to_json(const search_outcome& o);

// one row per config: params, the k fold scores, mean, std, seconds
void write_outcome_csv(const search_outcome& o, std::ostream& out);

}  // namespace bmt
