#include "bmtkit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "bmtkit/dataset.hpp"
#include "bmtkit/preprocess.hpp"
#include "bmtkit/rng.hpp"

namespace bmt {

namespace {

template <class F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

std::string hex_hash(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string checksum_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return hex_hash(fnv1a64(bytes.data(), bytes.size()));
}

void require_known_keys(const nlohmann::json& j,
                        std::initializer_list<const char*> known,
                        const char* where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(), [&](const char* k) {
          return key == k;
        }) == known.end())
      throw std::invalid_argument(std::string(where) + ": unknown field '" +
                                  key + "'");
  }
}

}  // namespace

const std::vector<std::string>& leaky_columns() {
  // everything recorded at or after the outcome itself
  static const std::vector<std::string> cols{
      "survival_time",       "relapse",
      "PLT_recovery",        "ANC_recovery",
      "time_to_acute_GvHD_III_IV", "acute_GvHD_II_III_IV",
      "acute_GvHD_III_IV",   "extensive_chronic_GvHD"};
  return cols;
}

design_matrix strip_leaky(const design_matrix& m) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < m.n_cols; ++c) {
    const std::string& name = m.column_names[c];
    bool leaky = false;
    for (const auto& base : leaky_columns())
      leaky = leaky || name == base || name.rfind(base + "_", 0) == 0;
    if (!leaky) keep.push_back(c);
  }
  return take_columns(m, keep);
}

experiment_config experiment_preset(const std::string& id,
                                    const std::string& dataset_path) {
  experiment_config c;
  c.id = id;
  c.dataset_path = dataset_path;
  if (id == "A") {
    // full features, stock hyperparameters
  } else if (id == "B") {
    c.hpo.enabled = true;
  } else if (id == "C") {
    c.feature_mode = "top_k";
  } else if (id == "D") {
    c.feature_mode = "top_k";
    c.hpo.enabled = true;
  } else if (id != "custom") {
    throw std::invalid_argument("unknown experiment '" + id +
                                "' (A, B, C, D, or custom)");
  }
  return c;
}

experiment_config config_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("config: expected a JSON object");
  require_known_keys(j,
                     {"experiment", "dataset", "target", "positive_level",
                      "split", "feature_mode", "top_k", "hpo", "models",
                      "drop_leaky"},
                     "config");
  experiment_config c;
  c.id = j.value("experiment", c.id);
  c.dataset_path = j.value("dataset", c.dataset_path);
  c.target = j.value("target", c.target);
  c.positive_level = j.value("positive_level", c.positive_level);
  if (j.contains("split")) {
    const auto& s = j.at("split");
    require_known_keys(s, {"ratio", "seed", "stratified"}, "config.split");
    c.split.ratio = s.value("ratio", c.split.ratio);
    c.split.seed = s.value("seed", c.split.seed);
    c.split.stratified = s.value("stratified", c.split.stratified);
  }
  c.feature_mode = j.value("feature_mode", c.feature_mode);
  c.top_k = j.value("top_k", c.top_k);
  if (j.contains("hpo")) {
    const auto& h = j.at("hpo");
    require_known_keys(h, {"enabled", "k_folds", "seed", "threads", "grids"},
                       "config.hpo");
    c.hpo.enabled = h.value("enabled", c.hpo.enabled);
    c.hpo.k_folds = h.value("k_folds", c.hpo.k_folds);
    c.hpo.seed = h.value("seed", c.hpo.seed);
    c.hpo.n_threads = h.value("threads", c.hpo.n_threads);
    if (h.contains("grids"))
      for (const auto& [name, grid] : h.at("grids").items()) {
        algorithm_from_name(name);  // reject unknown algorithms early
        c.hpo.grids[name] = grid_from_json(grid);
      }
  }
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& name : j.at("models"))
      c.models.push_back(algorithm_from_name(name.get<std::string>()));
  }
  c.drop_leaky = j.value("drop_leaky", c.drop_leaky);
  return c;
}

nlohmann::ordered_json config_to_json(const experiment_config& c) {
  nlohmann::ordered_json j;
  j["experiment"] = c.id;
  j["dataset"] = c.dataset_path;
  j["target"] = c.target;
  j["positive_level"] = c.positive_level;
  j["split"] = {{"ratio", c.split.ratio},
                {"seed", c.split.seed},
                {"stratified", c.split.stratified}};
  j["feature_mode"] = c.feature_mode;
  j["top_k"] = c.top_k;
  auto grids = nlohmann::ordered_json::object();
  for (const auto& [name, grid] : c.hpo.grids) grids[name] = grid_to_json(grid);
  j["hpo"] = {{"enabled", c.hpo.enabled},
              {"k_folds", c.hpo.k_folds},
              {"seed", c.hpo.seed},
              {"threads", c.hpo.n_threads},
              {"grids", std::move(grids)}};
  auto names = nlohmann::ordered_json::array();
  for (algorithm a : c.models) names.push_back(algorithm_name(a));
  j["models"] = std::move(names);
  j["drop_leaky"] = c.drop_leaky;
  return j;
}

experiment_report run_experiment(const experiment_config& config) {
  if (config.models.empty())
    throw std::invalid_argument("config: no models selected");
  if (config.feature_mode != "full" && config.feature_mode != "top_k")
    throw std::invalid_argument("config: feature_mode must be full or top_k");
  if (!(config.split.ratio > 0.0 && config.split.ratio < 1.0))
    throw std::invalid_argument("config: split ratio must sit inside (0, 1)");

  const auto start = std::chrono::steady_clock::now();
  experiment_report report;
  report.config = config;

  auto ds = stage("ingest", [&] {
    report.dataset_checksum = checksum_file(config.dataset_path);
    auto d = load_table(config.dataset_path);
    d.set_target(config.target);
    return d;
  });

  auto imputed = stage("impute", [&] {
    return apply_imputer(ds, fit_imputer(ds));
  });

  auto matrix = stage("encode", [&] {
    auto enc = fit_encoding(imputed);
    return apply_encoding(imputed, enc, config.target, config.positive_level);
  });

  if (config.drop_leaky)
    stage("encode", [&] {
      matrix = strip_leaky(matrix);
      return 0;
    });

  stage("rank", [&] {
    report.ranking = rank_features(matrix);
    return 0;
  });

  auto selected = stage("select", [&] {
    if (config.feature_mode == "top_k")
      return select_top_k(matrix, report.ranking, config.top_k);
    return matrix;
  });
  report.features_used = selected.column_names;
  report.n_features = selected.n_cols;

  auto split = stage("split", [&] {
    // an unstratified draw is a stratified one over a single class
    std::vector<int> strata = config.split.stratified
                                  ? selected.labels
                                  : std::vector<int>(selected.n_rows, 0);
    return train_test_split(selected.n_rows, config.split.ratio,
                            config.split.seed, strata);
  });

  design_matrix train, test;
  stage("scale", [&] {
    auto train_raw = take_rows(selected, split.train_rows);
    auto test_raw = take_rows(selected, split.test_rows);
    auto params = fit_scaler(train_raw);
    train = apply_scaler(train_raw, params);
    test = apply_scaler(test_raw, params);
    return 0;
  });
  report.n_train = train.n_rows;
  report.n_test = test.n_rows;

  for (algorithm algo : config.models) {
    model_result result;
    result.algo = algo;
    const std::string name = algorithm_name(algo);

    if (config.hpo.enabled) {
      auto outcome = stage("tune", [&] {
        auto it = config.hpo.grids.find(name);
        param_grid grid = it != config.hpo.grids.end() ? it->second
                                                       : default_grid(algo);
        report.grid_hashes[name] =
            hex_hash(fnv1a64(grid_to_json(grid).dump()));
        return grid_search(algo, grid, view_of(train), train.labels,
                           config.hpo.k_folds, config.hpo.seed, "accuracy",
                           config.hpo.n_threads);
      });
      result.tuned = true;
      result.chosen_hp = outcome.best_config;
      result.cv_mean_accuracy = outcome.results[outcome.best_index].mean_score;
      result.search_seconds = outcome.total_seconds;
    }

    auto fitted = stage("fit", [&] {
      return fit_model({algo, result.chosen_hp, config.split.seed},
                       view_of(train), train.labels);
    });

    stage("evaluate", [&] {
      auto pred = predict(fitted, view_of(test));
      result.confusion = confusion_from_labels(test.labels, pred.labels);
      result.metrics = metrics_from_confusion(result.confusion);
      result.roc = roc_from_scores(test.labels, pred.scores);
      result.roc_auc = auc_trapezoid(result.roc);
      return 0;
    });

    report.models.push_back(std::move(result));
  }

  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

nlohmann::ordered_json report_to_json(const experiment_report& r) {
  nlohmann::ordered_json j;
  j["format"] = "bmtkit-report";
  j["version"] = 1;
  j["experiment"] = r.config.id;
  j["config"] = config_to_json(r.config);
  j["environment"] = {{"dataset_checksum", r.dataset_checksum},
                      {"grid_hashes", r.grid_hashes},
                      {"n_train", r.n_train},
                      {"n_test", r.n_test},
                      {"n_features", r.n_features}};
  auto ranking = nlohmann::ordered_json::array();
  for (const auto& e : r.ranking.entries)
    ranking.push_back({{"attribute", e.column},
                       {"original_index", e.original_index},
                       {"score", e.score}});
  j["ranking"] = std::move(ranking);
  j["features_used"] = r.features_used;
  auto models = nlohmann::ordered_json::array();
  for (const auto& m : r.models) {
    nlohmann::ordered_json row;
    row["algorithm"] = algorithm_name(m.algo);
    row["tuned"] = m.tuned;
    row["chosen_hyperparameters"] = hp_to_json(m.chosen_hp);
    if (m.tuned) {
      row["cv_mean_accuracy"] = m.cv_mean_accuracy;
      row["search_seconds"] = m.search_seconds;
    }
    row["metrics"] = to_json(m.metrics);
    row["roc_auc"] = m.roc_auc;
    row["roc"] = to_json(m.roc);
    models.push_back(std::move(row));
  }
  j["models"] = std::move(models);
  j["total_seconds"] = r.total_seconds;
  return j;
}

experiment_report report_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "bmtkit-report")
    throw std::invalid_argument("not a report document");
  if (j.value("version", 0) != 1)
    throw std::invalid_argument("unsupported report version");

  experiment_report r;
  r.config = config_from_json(j.at("config"));
  const auto& env = j.at("environment");
  r.dataset_checksum = env.at("dataset_checksum").get<std::string>();
  if (env.contains("grid_hashes"))
    for (const auto& [name, hash] : env.at("grid_hashes").items())
      r.grid_hashes[name] = hash.get<std::string>();
  r.n_train = env.at("n_train").get<std::size_t>();
  r.n_test = env.at("n_test").get<std::size_t>();
  r.n_features = env.at("n_features").get<std::size_t>();

  for (const auto& e : j.at("ranking"))
    r.ranking.entries.push_back({e.at("attribute").get<std::string>(),
                                 e.at("score").get<double>(),
                                 e.at("original_index").get<std::size_t>()});
  r.features_used = j.at("features_used").get<std::vector<std::string>>();

  for (const auto& row : j.at("models")) {
    model_result m;
    m.algo = algorithm_from_name(row.at("algorithm").get<std::string>());
    m.tuned = row.at("tuned").get<bool>();
    m.chosen_hp = hp_from_json(row.at("chosen_hyperparameters"));
    if (m.tuned) {
      m.cv_mean_accuracy = row.at("cv_mean_accuracy").get<double>();
      m.search_seconds = row.at("search_seconds").get<double>();
    }
    const auto& cm = row.at("metrics").at("confusion");
    m.confusion = {cm.at("tp").get<std::size_t>(), cm.at("tn").get<std::size_t>(),
                   cm.at("fp").get<std::size_t>(), cm.at("fn").get<std::size_t>()};
    m.metrics = metrics_from_confusion(m.confusion);
    m.roc_auc = row.at("roc_auc").get<double>();
    const auto& roc = row.at("roc");
    m.roc.fpr = roc.at("fpr").get<std::vector<double>>();
    m.roc.tpr = roc.at("tpr").get<std::vector<double>>();
    // +infinity cannot ride through JSON, it lands as null
    for (const auto& t : roc.at("thresholds"))
      m.roc.thresholds.push_back(t.is_null()
                                     ? std::numeric_limits<double>::infinity()
                                     : t.get<double>());
    r.models.push_back(std::move(m));
  }
  r.total_seconds = j.value("total_seconds", 0.0);
  return r;
}

comparison_table compare_experiments(
    const std::vector<experiment_report>& reports) {
  if (reports.size() < 2)
    throw std::invalid_argument("compare: need at least two reports");

  comparison_table table;
  for (const auto& r : reports) {
    comparison_table::metric_row row;
    row.experiment = r.config.id;
    for (const auto& m : r.models) {
      row.accuracy = std::max(row.accuracy, m.metrics.accuracy);
      row.precision = std::max(row.precision, m.metrics.precision);
      row.recall = std::max(row.recall, m.metrics.recall);
      row.f1 = std::max(row.f1, m.metrics.f1);
      row.roc_auc = std::max(row.roc_auc, m.roc_auc);
    }
    table.max_metrics.push_back(row);
    if (r.config.hpo.enabled) table.tuned_experiments.push_back(r.config.id);
  }

  const double absent = std::numeric_limits<double>::quiet_NaN();
  for (algorithm a : all_algorithms) {
    comparison_table::timing_row row;
    row.algo = algorithm_name(a);
    bool any = false;
    for (const auto& r : reports) {
      if (!r.config.hpo.enabled) continue;
      double seconds = absent;
      for (const auto& m : r.models)
        if (m.algo == a && m.tuned) seconds = m.search_seconds;
      any = any || !std::isnan(seconds);
      row.seconds.push_back(seconds);
    }
    if (any) table.search_times.push_back(std::move(row));
  }
  return table;
}

nlohmann::ordered_json comparison_to_json(const comparison_table& t) {
  nlohmann::ordered_json j;
  auto best = nlohmann::ordered_json::array();
  for (const auto& row : t.max_metrics)
    best.push_back({{"experiment", row.experiment},
                    {"accuracy", row.accuracy},
                    {"precision", row.precision},
                    {"recall", row.recall},
                    {"f1", row.f1},
                    {"roc_auc", row.roc_auc}});
  j["best_metrics"] = std::move(best);
  j["tuned_experiments"] = t.tuned_experiments;
  auto times = nlohmann::ordered_json::array();
  for (const auto& row : t.search_times) {
    nlohmann::ordered_json entry;
    entry["algorithm"] = row.algo;
    auto seconds = nlohmann::ordered_json::array();
    for (double s : row.seconds)
      if (std::isnan(s))
        seconds.push_back(nullptr);
      else
        seconds.push_back(s);
    entry["search_seconds"] = std::move(seconds);
    times.push_back(std::move(entry));
  }
  j["search_times"] = std::move(times);
  return j;
}

void print_comparison(const comparison_table& t, std::ostream& out) {
  char buf[160];
  out << "best metric per experiment\n";
  std::snprintf(buf, sizeof buf, "%-12s %9s %9s %9s %9s %9s\n", "experiment",
                "accuracy", "precision", "recall", "f1", "roc_auc");
  out << buf;
  for (const auto& row : t.max_metrics) {
    std::snprintf(buf, sizeof buf, "%-12s %9.4f %9.4f %9.4f %9.4f %9.4f\n",
                  row.experiment.c_str(), row.accuracy, row.precision,
                  row.recall, row.f1, row.roc_auc);
    out << buf;
  }
  if (t.search_times.empty()) return;

  out << "\ngrid search seconds per algorithm\n";
  std::snprintf(buf, sizeof buf, "%-12s", "algorithm");
  out << buf;
  for (const auto& id : t.tuned_experiments) {
    std::snprintf(buf, sizeof buf, " %9s", id.c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& row : t.search_times) {
    std::snprintf(buf, sizeof buf, "%-12s", row.algo.c_str());
    out << buf;
    for (double s : row.seconds) {
      if (std::isnan(s))
        std::snprintf(buf, sizeof buf, " %9s", "-");
      else
        std::snprintf(buf, sizeof buf, " %9.2f", s);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace bmt
