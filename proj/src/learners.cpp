#include <bmtkit/learners.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bmt {

namespace {

constexpr double kProbClip = 1e-12;

[[noreturn]] void bad_hp(const char* algo, const std::string& detail) {
  throw std::invalid_argument(std::string(algo) + ": " + detail);
}

void require_known(const hp_map& hp, std::initializer_list<const char*> names,
                   const char* algo) {
  for (const auto& [key, value] : hp) {
    (void)value;
    bool known = false;
    for (const char* n : names)
      if (key == n) {
        known = true;
        break;
      }
    if (!known) bad_hp(algo, "unknown hyperparameter '" + key + "'");
  }
}

double num_hp(const hp_map& hp, const char* name, double fallback,
              const char* algo) {
  auto it = hp.find(name);
  if (it == hp.end()) return fallback;
  if (const double* v = std::get_if<double>(&it->second)) return *v;
  bad_hp(algo, std::string("hyperparameter '") + name + "' must be numeric");
}

std::size_t size_hp(const hp_map& hp, const char* name, std::size_t fallback,
                    std::size_t minimum, const char* algo) {
  double v = num_hp(hp, name, static_cast<double>(fallback), algo);
  if (v < static_cast<double>(minimum) || v != std::floor(v))
    bad_hp(algo, std::string("hyperparameter '") + name +
                     "' must be an integer >= " + std::to_string(minimum));
  return static_cast<std::size_t>(v);
}

std::string str_hp(const hp_map& hp, const char* name,
                   const std::string& fallback, const char* algo) {
  auto it = hp.find(name);
  if (it == hp.end()) return fallback;
  if (const std::string* v = std::get_if<std::string>(&it->second)) return *v;
  bad_hp(algo, std::string("hyperparameter '") + name + "' must be a string");
}

void check_training_input(data_view X, const std::vector<int>& y,
                          const char* algo) {
  if (X.n_rows == 0) bad_hp(algo, "empty training matrix");
  if (X.n_cols == 0) bad_hp(algo, "zero-width training matrix");
  if (y.size() != X.n_rows) bad_hp(algo, "labels do not match matrix rows");
  for (int v : y)
    if (v != 0 && v != 1) bad_hp(algo, "labels must be 0/1");
}

std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  return rows;
}

double positive_fraction(const std::vector<int>& y) {
  std::size_t pos = 0;
  for (int v : y) pos += static_cast<std::size_t>(v);
  return static_cast<double>(pos) / static_cast<double>(y.size());
}

double mean_deviance(const std::vector<int>& y, const std::vector<double>& F) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double p = std::clamp(sigmoid(F[i]), kProbClip, 1.0 - kProbClip);
    total += y[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return 2.0 * total / static_cast<double>(y.size());
}

// floor(fraction * n), at least one row, indices ascending for reproducible
// accumulation order
std::vector<std::uint32_t> sample_rows(std::size_t n, double fraction,
                                       rng& gen) {
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  if (fraction >= 1.0) return idx;
  std::size_t m = std::max<std::size_t>(
      1, static_cast<std::size_t>(fraction * static_cast<double>(n)));
  gen.shuffle(idx);
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void scale_leaves(tree& t, double factor) {
  for (tree_node& n : t)
    if (n.is_leaf()) n.value *= factor;
}

double ensemble_raw(const std::vector<tree>& trees, double base,
                    const double* row) {
  double f = base;
  for (const tree& t : trees) f += tree_value(t, row);
  return f;
}

}  // namespace

std::string algorithm_name(algorithm a) {
  switch (a) {
    case algorithm::dt: return "DT";
    case algorithm::rf: return "RF";
    case algorithm::lr: return "LR";
    case algorithm::knn: return "KNN";
    case algorithm::gbc: return "GBC";
    case algorithm::adb: return "AdB";
    case algorithm::xgb: return "XGB";
  }
  throw std::logic_error("unreachable algorithm tag");
}

algorithm algorithm_from_name(const std::string& name) {
  for (algorithm a : all_algorithms)
    if (algorithm_name(a) == name) return a;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

data_view view_of(const design_matrix& m) {
  return {m.values.data(), m.n_rows, m.n_cols};
}

// ---- decision tree ----

namespace {

class_tree_params parse_cart(const hp_map& hp) {
  require_known(hp, {"max_depth", "min_samples_split", "min_samples_leaf",
                     "criterion"},
                "dt");
  class_tree_params p;
  p.max_depth = size_hp(hp, "max_depth", 0, 0, "dt");
  p.min_samples_split = size_hp(hp, "min_samples_split", 2, 2, "dt");
  p.min_samples_leaf = size_hp(hp, "min_samples_leaf", 1, 1, "dt");
  std::string crit = str_hp(hp, "criterion", "gini", "dt");
  if (crit == "entropy")
    p.use_entropy = true;
  else if (crit != "gini")
    bad_hp("dt", "criterion must be gini or entropy");
  return p;
}

}  // namespace

trained_model fit_cart(data_view X, const std::vector<int>& y,
                       const hp_map& hp) {
  class_tree_params p = parse_cart(hp);
  check_training_input(X, y, "dt");
  trained_model m;
  m.spec = {algorithm::dt, hp, 0};
  m.n_features = X.n_cols;
  m.trees.push_back(fit_class_tree(X, y, all_rows(X.n_rows), nullptr, p));
  return m;
}

// ---- random forest ----

namespace {

struct rf_params {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;
  std::string max_features = "sqrt";
  double max_features_count = 0.0;  // used when max_features is numeric
  bool numeric_features = false;
  bool bootstrap = true;
  std::size_t min_samples_leaf = 1;
};

rf_params parse_rf(const hp_map& hp) {
  require_known(hp, {"n_trees", "max_depth", "max_features", "bootstrap",
                     "min_samples_leaf"},
                "rf");
  rf_params p;
  p.n_trees = size_hp(hp, "n_trees", 100, 1, "rf");
  p.max_depth = size_hp(hp, "max_depth", 0, 0, "rf");
  p.min_samples_leaf = size_hp(hp, "min_samples_leaf", 1, 1, "rf");
  p.bootstrap = num_hp(hp, "bootstrap", 1.0, "rf") != 0.0;
  auto it = hp.find("max_features");
  if (it != hp.end() && std::holds_alternative<double>(it->second)) {
    p.numeric_features = true;
    p.max_features_count = std::get<double>(it->second);
    if (p.max_features_count < 1.0 ||
        p.max_features_count != std::floor(p.max_features_count))
      bad_hp("rf", "numeric max_features must be a positive integer");
  } else {
    p.max_features = str_hp(hp, "max_features", "sqrt", "rf");
    if (p.max_features != "sqrt" && p.max_features != "all")
      bad_hp("rf", "max_features must be sqrt, all, or a count");
  }
  return p;
}

}  // namespace

trained_model fit_random_forest(data_view X, const std::vector<int>& y,
                                const hp_map& hp, std::uint64_t seed) {
  rf_params p = parse_rf(hp);
  check_training_input(X, y, "rf");
  std::size_t d = X.n_cols;
  std::size_t mf;
  if (p.numeric_features) {
    if (p.max_features_count > static_cast<double>(d))
      bad_hp("rf", "max_features exceeds the number of columns");
    mf = static_cast<std::size_t>(p.max_features_count);
  } else if (p.max_features == "sqrt") {
    mf = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  } else {
    mf = d;
  }

  trained_model m;
  m.spec = {algorithm::rf, hp, seed};
  m.n_features = d;
  rng master(seed);
  const std::size_t n = X.n_rows;
  for (std::size_t t = 0; t < p.n_trees; ++t) {
    rng tree_gen = master.fork(static_cast<std::uint64_t>(t));
    std::vector<std::uint32_t> rows;
    if (p.bootstrap) {
      rows.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        rows[i] = static_cast<std::uint32_t>(tree_gen.below(n));
      std::sort(rows.begin(), rows.end());
    } else {
      rows = all_rows(n);
    }
    class_tree_params tp;
    tp.max_depth = p.max_depth;
    tp.min_samples_leaf = p.min_samples_leaf;
    tp.max_features = mf < d ? mf : 0;
    tp.gen = &tree_gen;
    m.trees.push_back(fit_class_tree(X, y, rows, nullptr, tp));
  }
  return m;
}

// ---- logistic regression ----

double logistic_loss(data_view X, const std::vector<int>& y,
                     const std::vector<double>& w, double b, double l2) {
  double total = 0.0;
  for (std::size_t i = 0; i < X.n_rows; ++i) {
    const double* row = X.row(i);
    double z = b;
    for (std::size_t j = 0; j < X.n_cols; ++j) z += w[j] * row[j];
    // max(z,0) - y*z + log1p(exp(-|z|)) is log(1+e^z) - y*z without overflow
    total += std::max(z, 0.0) - static_cast<double>(y[i]) * z +
             std::log1p(std::exp(-std::abs(z)));
  }
  double penalty = 0.0;
  for (double wj : w) penalty += wj * wj;
  return total / static_cast<double>(X.n_rows) + 0.5 * l2 * penalty;
}

void logistic_gradient(data_view X, const std::vector<int>& y,
                       const std::vector<double>& w, double b, double l2,
                       std::vector<double>& grad_w, double& grad_b) {
  grad_w.assign(X.n_cols, 0.0);
  grad_b = 0.0;
  for (std::size_t i = 0; i < X.n_rows; ++i) {
    const double* row = X.row(i);
    double z = b;
    for (std::size_t j = 0; j < X.n_cols; ++j) z += w[j] * row[j];
    double delta = sigmoid(z) - static_cast<double>(y[i]);
    for (std::size_t j = 0; j < X.n_cols; ++j) grad_w[j] += delta * row[j];
    grad_b += delta;
  }
  const double inv_n = 1.0 / static_cast<double>(X.n_rows);
  for (std::size_t j = 0; j < X.n_cols; ++j)
    grad_w[j] = grad_w[j] * inv_n + l2 * w[j];
  grad_b *= inv_n;
}

namespace {

struct lr_params {
  double l2 = 1.0;
  std::size_t max_iters = 500;
  double tolerance = 1e-6;
  bool backtracking = true;
  double step_size = 0.1;
};

lr_params parse_lr(const hp_map& hp) {
  require_known(hp, {"l2_strength", "max_iters", "tolerance",
                     "learning_rate_policy", "step_size"},
                "lr");
  lr_params p;
  p.l2 = num_hp(hp, "l2_strength", 1.0, "lr");
  if (p.l2 < 0.0) bad_hp("lr", "l2_strength must be >= 0");
  p.max_iters = size_hp(hp, "max_iters", 500, 0, "lr");
  p.tolerance = num_hp(hp, "tolerance", 1e-6, "lr");
  if (p.tolerance <= 0.0) bad_hp("lr", "tolerance must be > 0");
  std::string policy = str_hp(hp, "learning_rate_policy", "backtracking", "lr");
  if (policy == "fixed")
    p.backtracking = false;
  else if (policy != "backtracking")
    bad_hp("lr", "learning_rate_policy must be backtracking or fixed");
  p.step_size = num_hp(hp, "step_size", 0.1, "lr");
  if (p.step_size <= 0.0) bad_hp("lr", "step_size must be > 0");
  return p;
}

}  // namespace

trained_model fit_logistic(data_view X, const std::vector<int>& y,
                           const hp_map& hp) {
  lr_params p = parse_lr(hp);
  check_training_input(X, y, "lr");
  const std::size_t d = X.n_cols;
  std::vector<double> w(d, 0.0), gw;
  double b = 0.0, gb = 0.0;
  double loss = logistic_loss(X, y, w, b, p.l2);
  bool converged = false;
  std::size_t iters = 0;
  std::vector<double> cand_w(d);
  for (std::size_t iter = 0; iter < p.max_iters; ++iter) {
    logistic_gradient(X, y, w, b, p.l2, gw, gb);
    double gsq = gb * gb;
    for (double g : gw) gsq += g * g;
    if (std::sqrt(gsq) < p.tolerance) {
      converged = true;
      break;
    }
    double step = p.backtracking ? 1.0 : p.step_size;
    bool accepted = false;
    double cand_b = 0.0, cand_loss = 0.0;
    while (step >= 1e-16) {
      for (std::size_t j = 0; j < d; ++j) cand_w[j] = w[j] - step * gw[j];
      cand_b = b - step * gb;
      cand_loss = logistic_loss(X, y, cand_w, cand_b, p.l2);
      if (!std::isfinite(cand_loss)) {
        if (!p.backtracking)
          throw std::runtime_error(
              "lr: loss became non-finite at iteration " +
              std::to_string(iter));
        step /= 2.0;
        continue;
      }
      if (!p.backtracking || cand_loss <= loss - 1e-4 * step * gsq) {
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) {
      converged = true;  // no descent direction step helps; we are at rest
      break;
    }
    w.swap(cand_w);
    b = cand_b;
    loss = cand_loss;
    iters = iter + 1;
  }
  if (!converged && p.max_iters > 0) {
    logistic_gradient(X, y, w, b, p.l2, gw, gb);
    double gsq = gb * gb;
    for (double g : gw) gsq += g * g;
    converged = std::sqrt(gsq) < p.tolerance;
  }

  trained_model m;
  m.spec = {algorithm::lr, hp, 0};
  m.n_features = d;
  m.coef = std::move(w);
  m.intercept = b;
  m.converged = converged;
  m.rounds_run = iters;
  m.loss_trace.push_back(loss);
  return m;
}

// ---- k-nearest neighbors ----

namespace {

struct knn_params {
  std::size_t k = 5;
  bool inverse_distance = false;
};

knn_params parse_knn(const hp_map& hp) {
  require_known(hp, {"k", "weighting", "metric"}, "knn");
  knn_params p;
  p.k = size_hp(hp, "k", 5, 1, "knn");
  std::string weighting = str_hp(hp, "weighting", "uniform", "knn");
  if (weighting == "inverse_distance")
    p.inverse_distance = true;
  else if (weighting != "uniform")
    bad_hp("knn", "weighting must be uniform or inverse_distance");
  if (str_hp(hp, "metric", "euclidean", "knn") != "euclidean")
    bad_hp("knn", "metric must be euclidean");
  return p;
}

}  // namespace

prediction knn_predict(data_view train_X, const std::vector<int>& train_y,
                       data_view query_X, const hp_map& hp) {
  knn_params p = parse_knn(hp);
  check_training_input(train_X, train_y, "knn");
  if (query_X.n_cols != train_X.n_cols)
    bad_hp("knn", "query width does not match training width");
  const std::size_t n = train_X.n_rows;
  if (p.k > n) bad_hp("knn", "k exceeds the number of training rows");

  prediction out;
  out.scores.reserve(query_X.n_rows);
  out.labels.reserve(query_X.n_rows);
  std::vector<std::pair<double, std::uint32_t>> dist(n);
  for (std::size_t q = 0; q < query_X.n_rows; ++q) {
    const double* qrow = query_X.row(q);
    for (std::size_t i = 0; i < n; ++i) {
      const double* trow = train_X.row(i);
      double d2 = 0.0;
      for (std::size_t j = 0; j < train_X.n_cols; ++j) {
        double diff = qrow[j] - trow[j];
        d2 += diff * diff;
      }
      dist[i] = {d2, static_cast<std::uint32_t>(i)};
    }
    // (distance, training index) pairs; the index breaks distance ties
    std::partial_sort(dist.begin(), dist.begin() + p.k, dist.end());
    double score;
    if (p.inverse_distance) {
      double wsum = 0.0, wpos = 0.0;
      for (std::size_t i = 0; i < p.k; ++i) {
        double wgt = 1.0 / (std::sqrt(dist[i].first) + 1e-12);
        wsum += wgt;
        if (train_y[dist[i].second] == 1) wpos += wgt;
      }
      score = wpos / wsum;
    } else {
      std::size_t pos = 0;
      for (std::size_t i = 0; i < p.k; ++i)
        pos += static_cast<std::size_t>(train_y[dist[i].second]);
      score = static_cast<double>(pos) / static_cast<double>(p.k);
    }
    out.scores.push_back(score);
    out.labels.push_back(score > 0.5 ? 1 : 0);
  }
  return out;
}

trained_model fit_knn(data_view X, const std::vector<int>& y,
                      const hp_map& hp) {
  knn_params p = parse_knn(hp);
  check_training_input(X, y, "knn");
  if (p.k > X.n_rows) bad_hp("knn", "k exceeds the number of training rows");
  trained_model m;
  m.spec = {algorithm::knn, hp, 0};
  m.n_features = X.n_cols;
  m.train_X = dense_matrix(X.n_rows, X.n_cols);
  std::copy(X.values, X.values + X.n_rows * X.n_cols,
            m.train_X.values.begin());
  m.train_y = y;
  return m;
}

// ---- AdaBoost (SAMME) ----

namespace {

struct adb_params {
  std::size_t n_rounds = 50;
  double learning_rate = 1.0;
  std::size_t base_depth = 1;
};

adb_params parse_adb(const hp_map& hp) {
  require_known(hp, {"n_rounds", "learning_rate", "base_depth"}, "adb");
  adb_params p;
  p.n_rounds = size_hp(hp, "n_rounds", 50, 1, "adb");
  p.learning_rate = num_hp(hp, "learning_rate", 1.0, "adb");
  if (p.learning_rate <= 0.0) bad_hp("adb", "learning_rate must be > 0");
  p.base_depth = size_hp(hp, "base_depth", 1, 1, "adb");
  return p;
}

}  // namespace

trained_model fit_adaboost(data_view X, const std::vector<int>& y,
                           const hp_map& hp) {
  adb_params p = parse_adb(hp);
  check_training_input(X, y, "adb");
  const std::size_t n = X.n_rows;
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  std::vector<std::uint32_t> rows = all_rows(n);
  std::vector<int> h(n);

  trained_model m;
  m.spec = {algorithm::adb, hp, 0};
  m.n_features = X.n_cols;
  m.base_score = positive_fraction(y);

  class_tree_params tp;
  tp.max_depth = p.base_depth;
  for (std::size_t round = 0; round < p.n_rounds; ++round) {
    tree t = fit_class_tree(X, y, rows, &weights, tp);
    double eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = tree_value(t, X.row(i)) >= 0.5 ? 1 : 0;
      if (h[i] != y[i]) eps += weights[i];
    }
    if (eps >= 0.5) break;  // the base learner stopped helping; drop the round
    if (eps == 0.0) {
      // perfect learner gets a capped vote instead of an infinite one
      m.trees.push_back(std::move(t));
      m.alphas.push_back(p.learning_rate * std::log(1e10));
      ++m.rounds_run;
      break;
    }
    double alpha = p.learning_rate * std::log((1.0 - eps) / eps);
    m.trees.push_back(std::move(t));
    m.alphas.push_back(alpha);
    ++m.rounds_run;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (h[i] != y[i]) weights[i] *= std::exp(alpha);
      total += weights[i];
    }
    for (double& wgt : weights) wgt /= total;
    double check = 0.0;
    for (double wgt : weights) check += wgt;
    m.round_weight_sums.push_back(check);
  }
  return m;
}

// ---- gradient boosting ----

namespace {

struct gbc_params {
  std::size_t n_rounds = 100;
  double learning_rate = 0.1;
  std::size_t max_depth = 3;
  std::size_t min_samples_leaf = 1;
  double subsample = 1.0;
};

gbc_params parse_gbc(const hp_map& hp) {
  require_known(hp, {"n_rounds", "learning_rate", "max_depth",
                     "min_samples_leaf", "subsample"},
                "gbc");
  gbc_params p;
  p.n_rounds = size_hp(hp, "n_rounds", 100, 1, "gbc");
  p.learning_rate = num_hp(hp, "learning_rate", 0.1, "gbc");
  if (p.learning_rate < 0.0) bad_hp("gbc", "learning_rate must be >= 0");
  p.max_depth = size_hp(hp, "max_depth", 3, 1, "gbc");
  p.min_samples_leaf = size_hp(hp, "min_samples_leaf", 1, 1, "gbc");
  p.subsample = num_hp(hp, "subsample", 1.0, "gbc");
  if (p.subsample <= 0.0 || p.subsample > 1.0)
    bad_hp("gbc", "subsample must be in (0, 1]");
  return p;
}

double log_odds_base(const std::vector<int>& y, const char* algo) {
  std::size_t pos = 0;
  for (int v : y) pos += static_cast<std::size_t>(v);
  if (pos == 0 || pos == y.size())
    bad_hp(algo, "training labels are single-class");
  double rate = static_cast<double>(pos) / static_cast<double>(y.size());
  return std::log(rate / (1.0 - rate));
}

}  // namespace

trained_model fit_gradient_boost(data_view X, const std::vector<int>& y,
                                 const hp_map& hp, std::uint64_t seed) {
  gbc_params p = parse_gbc(hp);
  check_training_input(X, y, "gbc");
  const std::size_t n = X.n_rows;
  const double f0 = log_odds_base(y, "gbc");

  trained_model m;
  m.spec = {algorithm::gbc, hp, seed};
  m.n_features = X.n_cols;
  m.base_score = f0;

  std::vector<double> F(n, f0), residual(n), curvature(n);
  m.loss_trace.push_back(mean_deviance(y, F));
  rng master(seed);
  reg_tree_params tp{p.max_depth, p.min_samples_leaf};
  for (std::size_t round = 0; round < p.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double prob = sigmoid(F[i]);
      residual[i] = static_cast<double>(y[i]) - prob;
      curvature[i] = prob * (1.0 - prob);
    }
    rng round_gen = master.fork(static_cast<std::uint64_t>(round));
    std::vector<std::uint32_t> rows = sample_rows(n, p.subsample, round_gen);
    auto newton_leaf = [&](const std::vector<std::uint32_t>& leaf_rows) {
      double num = 0.0, den = 0.0;
      for (std::uint32_t r : leaf_rows) {
        num += residual[r];
        den += curvature[r];
      }
      return den > 1e-150 ? num / den : 0.0;
    };
    tree t = fit_reg_tree(X, residual, rows, tp, newton_leaf);
    scale_leaves(t, p.learning_rate);
    for (std::size_t i = 0; i < n; ++i) F[i] += tree_value(t, X.row(i));
    m.trees.push_back(std::move(t));
    ++m.rounds_run;
    m.loss_trace.push_back(mean_deviance(y, F));
  }
  return m;
}

// ---- second-order boosting ----

namespace {

struct xgb_params {
  std::size_t n_rounds = 100;
  double learning_rate = 0.3;
  std::size_t max_depth = 6;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  double subsample = 1.0;
  double colsample = 1.0;
};

xgb_params parse_xgb(const hp_map& hp) {
  require_known(hp, {"n_rounds", "learning_rate", "max_depth", "lambda",
                     "gamma", "min_child_weight", "subsample", "colsample"},
                "xgb");
  xgb_params p;
  p.n_rounds = size_hp(hp, "n_rounds", 100, 1, "xgb");
  p.learning_rate = num_hp(hp, "learning_rate", 0.3, "xgb");
  if (p.learning_rate < 0.0) bad_hp("xgb", "learning_rate must be >= 0");
  p.max_depth = size_hp(hp, "max_depth", 6, 0, "xgb");
  p.lambda = num_hp(hp, "lambda", 1.0, "xgb");
  if (p.lambda < 0.0) bad_hp("xgb", "lambda must be >= 0");
  p.gamma = num_hp(hp, "gamma", 0.0, "xgb");
  if (p.gamma < 0.0) bad_hp("xgb", "gamma must be >= 0");
  p.min_child_weight = num_hp(hp, "min_child_weight", 1.0, "xgb");
  if (p.min_child_weight < 0.0) bad_hp("xgb", "min_child_weight must be >= 0");
  p.subsample = num_hp(hp, "subsample", 1.0, "xgb");
  if (p.subsample <= 0.0 || p.subsample > 1.0)
    bad_hp("xgb", "subsample must be in (0, 1]");
  p.colsample = num_hp(hp, "colsample", 1.0, "xgb");
  if (p.colsample <= 0.0 || p.colsample > 1.0)
    bad_hp("xgb", "colsample must be in (0, 1]");
  return p;
}

}  // namespace

trained_model fit_xgb(data_view X, const std::vector<int>& y, const hp_map& hp,
                      std::uint64_t seed) {
  xgb_params p = parse_xgb(hp);
  check_training_input(X, y, "xgb");
  const std::size_t n = X.n_rows, d = X.n_cols;
  const double f0 = log_odds_base(y, "xgb");

  trained_model m;
  m.spec = {algorithm::xgb, hp, seed};
  m.n_features = d;
  m.base_score = f0;

  std::vector<double> F(n, f0), g(n), h(n);
  m.loss_trace.push_back(mean_deviance(y, F));
  rng master(seed);
  xgb_tree_params tp{p.max_depth, p.lambda, p.gamma, p.min_child_weight};
  for (std::size_t round = 0; round < p.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double prob = sigmoid(F[i]);
      g[i] = prob - static_cast<double>(y[i]);
      h[i] = prob * (1.0 - prob);
    }
    rng round_gen = master.fork(static_cast<std::uint64_t>(round));
    std::vector<std::uint32_t> rows = sample_rows(n, p.subsample, round_gen);
    std::vector<std::uint32_t> features(d);
    std::iota(features.begin(), features.end(), 0u);
    if (p.colsample < 1.0) {
      std::size_t keep = std::max<std::size_t>(
          1, static_cast<std::size_t>(p.colsample * static_cast<double>(d)));
      round_gen.shuffle(features);
      features.resize(keep);
      std::sort(features.begin(), features.end());
    }
    tree t = fit_xgb_tree(X, g, h, rows, features, tp);
    scale_leaves(t, p.learning_rate);
    for (std::size_t i = 0; i < n; ++i) F[i] += tree_value(t, X.row(i));
    m.trees.push_back(std::move(t));
    ++m.rounds_run;
    m.loss_trace.push_back(mean_deviance(y, F));
  }
  return m;
}

// ---- shared entry points ----

void validate_spec(const model_spec& spec) {
  switch (spec.algo) {
    case algorithm::dt: parse_cart(spec.hyperparameters); break;
    case algorithm::rf: parse_rf(spec.hyperparameters); break;
    case algorithm::lr: parse_lr(spec.hyperparameters); break;
    case algorithm::knn: parse_knn(spec.hyperparameters); break;
    case algorithm::adb: parse_adb(spec.hyperparameters); break;
    case algorithm::gbc: parse_gbc(spec.hyperparameters); break;
    case algorithm::xgb: parse_xgb(spec.hyperparameters); break;
  }
}

trained_model fit_model(const model_spec& spec, data_view X,
                        const std::vector<int>& y) {
  trained_model m;
  switch (spec.algo) {
    case algorithm::dt: m = fit_cart(X, y, spec.hyperparameters); break;
    case algorithm::rf:
      m = fit_random_forest(X, y, spec.hyperparameters, spec.seed);
      break;
    case algorithm::lr: m = fit_logistic(X, y, spec.hyperparameters); break;
    case algorithm::knn: m = fit_knn(X, y, spec.hyperparameters); break;
    case algorithm::adb: m = fit_adaboost(X, y, spec.hyperparameters); break;
    case algorithm::gbc:
      m = fit_gradient_boost(X, y, spec.hyperparameters, spec.seed);
      break;
    case algorithm::xgb:
      m = fit_xgb(X, y, spec.hyperparameters, spec.seed);
      break;
  }
  m.spec = spec;
  return m;
}

prediction predict(const trained_model& model, data_view X) {
  if (X.n_cols != model.n_features)
    throw std::invalid_argument(
        "predict: matrix width does not match the trained model");
  prediction out;
  if (model.spec.algo == algorithm::knn) {
    out = knn_predict(model.train_X.view(), model.train_y, X,
                      model.spec.hyperparameters);
    return out;
  }
  out.scores.reserve(X.n_rows);
  out.labels.reserve(X.n_rows);
  for (std::size_t i = 0; i < X.n_rows; ++i) {
    const double* row = X.row(i);
    double score = 0.0;
    switch (model.spec.algo) {
      case algorithm::dt:
        score = tree_value(model.trees.front(), row);
        break;
      case algorithm::rf: {
        double total = 0.0;
        for (const tree& t : model.trees) total += tree_value(t, row);
        score = total / static_cast<double>(model.trees.size());
        break;
      }
      case algorithm::lr: {
        double z = model.intercept;
        for (std::size_t j = 0; j < X.n_cols; ++j)
          z += model.coef[j] * row[j];
        score = sigmoid(z);
        break;
      }
      case algorithm::adb: {
        if (model.alphas.empty()) {
          score = model.base_score;  // no kept rounds: majority-class vote
          break;
        }
        double vote = 0.0, total = 0.0;
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
          total += model.alphas[t];
          if (tree_value(model.trees[t], row) >= 0.5) vote += model.alphas[t];
        }
        score = vote / total;
        break;
      }
      case algorithm::gbc:
      case algorithm::xgb:
        score = sigmoid(ensemble_raw(model.trees, model.base_score, row));
        break;
      case algorithm::knn: break;  // handled above
    }
    out.scores.push_back(score);
    out.labels.push_back(score >= 0.5 ? 1 : 0);
  }
  return out;
}

}  // namespace bmt
