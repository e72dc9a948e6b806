#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmtkit/chi2.hpp"
#include "bmtkit/metrics.hpp"
#include "bmtkit/tuning.hpp"

namespace bmt {

struct split_settings {
  double ratio = 0.2;
  std::uint64_t seed = 42;
  bool stratified = true;
};

struct hpo_settings {
  bool enabled = false;
  std::size_t k_folds = 10;
  std::uint64_t seed = 42;
  std::size_t n_threads = 1;
  // per-algorithm-name overrides; an absent entry means the stock grid
  std::map<std::string, param_grid> grids;
};

struct experiment_config {
  std::string id = "custom";
  std::string dataset_path;
  std::string target = "survival_status";
  std::string positive_level = "1";
  split_settings split;
  std::string feature_mode = "full";  // "full" or "top_k"
  std::size_t top_k = 11;
  hpo_settings hpo;
  std::vector<algorithm> models{all_algorithms.begin(), all_algorithms.end()};
  bool drop_leaky = false;
};

// The four canned setups: A full/defaults, B full/tuned, C top-11/defaults,
// D top-11/tuned.  Everything else about them is the shared default config.
experiment_config experiment_preset(const std::string& id,
                                    const std::string& dataset_path);

experiment_config config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const experiment_config& c);

// Outcome-derived columns; predicting survival with them in play is
// circular, so a flag can exclude them.  Off by default: the stock
// experiments keep the full attribute set, warts and all.
const std::vector<std::string>& leaky_columns();

// Drops every column derived from a leaky base (the base itself or any of
// its dummy levels).
design_matrix strip_leaky(const design_matrix& m);

struct model_result {
  algorithm algo = algorithm::dt;
  bool tuned = false;
  hp_map chosen_hp;               // empty means stock defaults
  double cv_mean_accuracy = 0.0;  // meaningful when tuned
  double search_seconds = 0.0;    // meaningful when tuned
  confusion_matrix confusion;
  metrics_report metrics;
  double roc_auc = 0.0;
  roc_curve roc;
};

struct experiment_report {
  experiment_config config;
  std::string dataset_checksum;
  std::map<std::string, std::string> grid_hashes;  // algorithm name -> hash
  std::size_t n_train = 0, n_test = 0, n_features = 0;
  feature_ranking ranking;                 // over the candidate predictors
  std::vector<std::string> features_used;  // post-selection column names
  std::vector<model_result> models;
  double total_seconds = 0.0;
};

// ingest -> impute -> encode -> rank -> select -> split -> scale ->
// per-model (search ->) fit -> test metrics.  One split serves every model;
// the scaler is fitted on the training rows of the selected columns only.
// Errors carry the pipeline stage that raised them.
experiment_report run_experiment(const experiment_config& config);

nlohmann::ordered_json report_to_json(const experiment_report& r);
experiment_report report_from_json(const nlohmann::json& j);

struct comparison_table {
  struct metric_row {
    std::string experiment;
    double accuracy = 0, precision = 0, recall = 0, f1 = 0, roc_auc = 0;
  };
  struct timing_row {
    std::string algo;
    std::vector<double> seconds;  // parallel to tuned_experiments
  };
  std::vector<metric_row> max_metrics;       // best of each metric per report
  std::vector<std::string> tuned_experiments;  // reports that ran a search
  std::vector<timing_row> search_times;
};

comparison_table compare_experiments(const std::vector<experiment_report>& reports);
nlohmann::ordered_json comparison_to_json(const comparison_table& t);
void print_comparison(const comparison_table& t, std::ostream& out);

// Writes report.json / metrics.csv, ranking.csv, per-model ROC CSVs /
// self-contained SVG charts into out_dir; returns the paths written.
std::vector<std::string> emit_report(const experiment_report& r,
                                     const std::set<std::string>& formats,
                                     const std::string& out_dir);

}  // namespace bmt
