#include "bmtkit/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "bmtkit/dataset.hpp"
#include "bmtkit/rng.hpp"

namespace bmt {

std::vector<std::vector<std::size_t>> kfold_indices(
    std::size_t n, std::size_t k, const std::vector<int>& labels,
    std::uint64_t seed, std::vector<std::string>* warnings) {
  if (k < 2) throw std::invalid_argument("kfold: need at least 2 folds");
  if (k > n)
    throw std::invalid_argument("kfold: " + std::to_string(k) +
                                " folds but only " + std::to_string(n) +
                                " rows");
  if (labels.size() != n)
    throw std::invalid_argument("kfold: label count does not match row count");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);

  bool stratify = true;
  for (const auto& [label, members] : by_class)
    if (members.size() < k) {
      stratify = false;
      if (warnings)
        warnings->push_back("kfold: class " + std::to_string(label) +
                            " has fewer members than folds; "
                            "falling back to an unstratified split");
      break;
    }

  rng gen(seed);
  std::vector<std::vector<std::size_t>> deal_order;
  if (stratify) {
    for (auto& [label, members] : by_class) {
      gen.shuffle(members);
      deal_order.push_back(std::move(members));
    }
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    gen.shuffle(all);
    deal_order.push_back(std::move(all));
  }

  // one cursor across the class lists keeps total fold sizes within one of
  // each other while each class still lands round-robin
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t cursor = 0;
  for (const auto& members : deal_order)
    for (std::size_t idx : members) folds[cursor++ % k].push_back(idx);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<hp_map> expand_grid(const param_grid& grid) {
  std::vector<std::string> names;
  std::vector<const std::vector<hp_value>*> values;
  std::size_t total = 1;
  for (const auto& [name, candidates] : grid) {
    if (candidates.empty())
      throw std::invalid_argument("grid: parameter '" + name +
                                  "' has no candidate values");
    names.push_back(name);
    values.push_back(&candidates);
    total *= candidates.size();
  }

  std::vector<hp_map> configs;
  configs.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    hp_map config;
    std::size_t rest = idx;
    // peel from the last name so the first one varies slowest
    for (std::size_t p = names.size(); p-- > 0;) {
      const auto& vals = *values[p];
      config[names[p]] = vals[rest % vals.size()];
      rest /= vals.size();
    }
    configs.push_back(std::move(config));
  }
  return configs;
}

namespace {

struct fold_data {
  dense_matrix train_X, test_X;
  std::vector<int> train_y, test_y;
};

fold_data materialize_fold(data_view X, const std::vector<int>& y,
                           const std::vector<std::vector<std::size_t>>& folds,
                           std::size_t f) {
  std::vector<std::size_t> train_rows;
  for (std::size_t g = 0; g < folds.size(); ++g)
    if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
  std::sort(train_rows.begin(), train_rows.end());

  fold_data fd;
  fd.train_X = dense_matrix(train_rows.size(), X.n_cols);
  fd.test_X = dense_matrix(folds[f].size(), X.n_cols);
  for (std::size_t i = 0; i < train_rows.size(); ++i) {
    for (std::size_t j = 0; j < X.n_cols; ++j)
      fd.train_X.at(i, j) = X.at(train_rows[i], j);
    fd.train_y.push_back(y[train_rows[i]]);
  }
  for (std::size_t i = 0; i < folds[f].size(); ++i) {
    for (std::size_t j = 0; j < X.n_cols; ++j)
      fd.test_X.at(i, j) = X.at(folds[f][i], j);
    fd.test_y.push_back(y[folds[f][i]]);
  }
  return fd;
}

double population_std(const std::vector<double>& xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace

search_outcome grid_search(algorithm algo, const param_grid& grid, data_view X,
                           const std::vector<int>& y, std::size_t k,
                           std::uint64_t seed, const std::string& scoring,
                           std::size_t n_threads) {
  if (scoring != "accuracy")
    throw std::invalid_argument("grid_search: unknown scoring '" + scoring + "'");
  if (y.size() != X.n_rows)
    throw std::invalid_argument("grid_search: label count does not match rows");

  const auto start = std::chrono::steady_clock::now();
  const auto folds = kfold_indices(X.n_rows, k, y, seed);
  const auto configs = expand_grid(grid);
  for (const auto& config : configs) validate_spec({algo, config, seed});

  std::vector<fold_data> fold_cache;
  fold_cache.reserve(k);
  for (std::size_t f = 0; f < k; ++f)
    fold_cache.push_back(materialize_fold(X, y, folds, f));

  // config x fold jobs are independent; every fit reuses the search seed so
  // stochastic models see common draws across configs
  const std::size_t total_jobs = configs.size() * k;
  std::vector<double> scores(total_jobs, 0.0);
  std::vector<double> seconds(total_jobs, 0.0);
  std::vector<std::string> errors(total_jobs);
  std::atomic<std::size_t> next{0};

  auto run_jobs = [&] {
    for (std::size_t job = next.fetch_add(1); job < total_jobs;
         job = next.fetch_add(1)) {
      const std::size_t c = job / k, f = job % k;
      const auto& fd = fold_cache[f];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        auto m = fit_model({algo, configs[c], seed}, fd.train_X.view(),
                           fd.train_y);
        auto pred = predict(m, fd.test_X.view());
        std::size_t hits = 0;
        for (std::size_t i = 0; i < fd.test_y.size(); ++i)
          hits += static_cast<std::size_t>(pred.labels[i] == fd.test_y[i]);
        scores[job] = static_cast<double>(hits) /
                      static_cast<double>(fd.test_y.size());
      } catch (const std::exception& e) {
        errors[job] = e.what();
      }
      seconds[job] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    }
  };

  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  if (n_threads <= 1) {
    run_jobs();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(run_jobs);
    for (auto& t : pool) t.join();
  }

  for (std::size_t job = 0; job < total_jobs; ++job)
    if (!errors[job].empty())
      throw std::runtime_error("grid_search: config " +
                               std::to_string(job / k) + ", fold " +
                               std::to_string(job % k) + ": " + errors[job]);

  search_outcome out;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    cv_result r;
    r.config = configs[c];
    double sum = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
      r.fold_scores.push_back(scores[c * k + f]);
      sum += scores[c * k + f];
      r.fit_time_seconds += seconds[c * k + f];
    }
    r.mean_score = sum / static_cast<double>(k);
    r.std_score = population_std(r.fold_scores, r.mean_score);
    out.results.push_back(std::move(r));
  }

  out.best_index = 0;
  for (std::size_t c = 1; c < out.results.size(); ++c)
    if (out.results[c].mean_score > out.results[out.best_index].mean_score)
      out.best_index = c;
  out.best_config = out.results[out.best_index].config;
  out.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

param_grid default_grid(algorithm algo) {
  auto nums = [](std::initializer_list<double> xs) {
    std::vector<hp_value> v;
    for (double x : xs) v.emplace_back(x);
    return v;
  };
  auto words = [](std::initializer_list<const char*> xs) {
    std::vector<hp_value> v;
    for (const char* x : xs) v.emplace_back(std::string(x));
    return v;
  };
  switch (algo) {
    case algorithm::dt:
      return {{"max_depth", nums({2, 4, 6, 8, 0})},
              {"min_samples_split", nums({2, 5, 10})},
              {"criterion", words({"gini", "entropy"})}};
    case algorithm::rf:
      return {{"n_trees", nums({50, 100, 200})},
              {"max_depth", nums({4, 8, 0})},
              {"max_features", words({"sqrt", "all"})}};
    case algorithm::lr:
      return {{"l2_strength", nums({0.01, 0.1, 1, 10, 100})}};
    case algorithm::knn:
      return {{"k", nums({3, 5, 7, 9, 11})},
              {"weighting", words({"uniform", "inverse_distance"})}};
    case algorithm::gbc:
      return {{"n_rounds", nums({50, 100, 200})},
              {"learning_rate", nums({0.01, 0.1, 0.3})},
              {"max_depth", nums({2, 3})}};
    case algorithm::adb:
      return {{"n_rounds", nums({50, 100, 200})},
              {"learning_rate", nums({0.1, 0.5, 1.0})}};
    case algorithm::xgb:
      return {{"n_rounds", nums({50, 100, 200})},
              {"learning_rate", nums({0.01, 0.1, 0.3})},
              {"max_depth", nums({2, 3})},
              {"lambda", nums({0, 1, 10})}};
  }
  throw std::logic_error("default_grid: unhandled algorithm");
}

param_grid grid_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("grid: expected an object of candidate lists");
  param_grid grid;
  for (const auto& [name, value] : j.items()) {
    std::vector<hp_value> candidates;
    auto push = [&](const nlohmann::json& v) {
      if (v.is_number())
        candidates.emplace_back(v.get<double>());
      else if (v.is_boolean())
        candidates.emplace_back(v.get<bool>() ? 1.0 : 0.0);
      else if (v.is_string())
        candidates.emplace_back(v.get<std::string>());
      else
        throw std::invalid_argument("grid: parameter '" + name +
                                    "' has a non-scalar candidate");
    };
    if (value.is_array())
      for (const auto& v : value) push(v);
    else
      push(value);  // scalar shorthand for a single candidate
    if (candidates.empty())
      throw std::invalid_argument("grid: parameter '" + name +
                                  "' has no candidate values");
    grid[name] = std::move(candidates);
  }
  return grid;
}

nlohmann::ordered_json grid_to_json(const param_grid& grid) {
  auto j = nlohmann::ordered_json::object();
  for (const auto& [name, candidates] : grid) {
    auto list = nlohmann::ordered_json::array();
    for (const auto& value : candidates) {
      if (const double* d = std::get_if<double>(&value))
        list.push_back(*d);
      else
        list.push_back(std::get<std::string>(value));
    }
    j[name] = std::move(list);
  }
  return j;
}

nlohmann::ordered_json outcome_to_json(const search_outcome& o) {
  nlohmann::ordered_json j;
  j["best_config"] = hp_to_json(o.best_config);
  j["best_index"] = o.best_index;
  j["total_seconds"] = o.total_seconds;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : o.results) {
    nlohmann::ordered_json row;
    row["config"] = hp_to_json(r.config);
    row["fold_scores"] = r.fold_scores;
    row["mean_score"] = r.mean_score;
    row["std_score"] = r.std_score;
    row["fit_time_seconds"] = r.fit_time_seconds;
    rows.push_back(std::move(row));
  }
  j["results"] = std::move(rows);
  return j;
}

void write_outcome_csv(const search_outcome& o, std::ostream& out) {
  const std::size_t k = o.results.empty() ? 0 : o.results.front().fold_scores.size();
  out << "config,params";
  for (std::size_t f = 1; f <= k; ++f) out << ",fold_" << f;
  out << ",mean,std,seconds\n";
  for (std::size_t c = 0; c < o.results.size(); ++c) {
    const auto& r = o.results[c];
    out << c << ",";
    bool first = true;
    for (const auto& [name, value] : r.config) {
      if (!first) out << ';';
      first = false;
      out << name << '=';
      if (const double* d = std::get_if<double>(&value))
        out << format_number(*d);
      else
        out << std::get<std::string>(value);
    }
    for (double s : r.fold_scores) out << ',' << format_number(s);
    out << ',' << format_number(r.mean_score) << ','
        << format_number(r.std_score) << ','
        << format_number(r.fit_time_seconds) << '\n';
  }
}

}  // namespace bmt
