#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include <bmtkit/preprocess.hpp>
#include <bmtkit/tree.hpp>

namespace bmt {

enum class algorithm { dt, rf, lr, knn, gbc, adb, xgb };

inline constexpr std::array<algorithm, 7> all_algorithms = {
    algorithm::dt,  algorithm::rf,  algorithm::lr, algorithm::knn,
    algorithm::gbc, algorithm::adb, algorithm::xgb};

std::string algorithm_name(algorithm a);
algorithm algorithm_from_name(const std::string& name);

// numeric or categorical hyperparameter; integers ride as doubles
using hp_value = std::variant<double, std::string>;
using hp_map = std::map<std::string, hp_value>;

struct model_spec {
  algorithm algo = algorithm::dt;
  hp_map hyperparameters;
  std::uint64_t seed = 0;
};

// rejects unknown hyperparameter names and out-of-range values
void validate_spec(const model_spec& spec);

// Fitted state for any of the seven algorithms; unused fields stay empty.
// Immutable once fitted, cheap to copy except for KNN's stored matrix.
struct trained_model {
  model_spec spec;
  std::size_t n_features = 0;
  std::vector<tree> trees;                // DT, RF, AdB, GBC, XGB
  std::vector<double> alphas;             // AdB round weights
  double base_score = 0.0;                // boosting F0; AdB majority fallback
  std::vector<double> coef;               // LR weights
  double intercept = 0.0;
  bool converged = false;
  dense_matrix train_X;                   // KNN keeps its training rows
  std::vector<int> train_y;
  std::size_t rounds_run = 0;
  std::vector<double> loss_trace;         // boosting train deviance, F0 first
  std::vector<double> round_weight_sums;  // AdB weight total after each round
};

struct prediction {
  std::vector<double> scores;
  std::vector<int> labels;
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

trained_model fit_cart(data_view X, const std::vector<int>& y,
                       const hp_map& hp = {});
trained_model fit_random_forest(data_view X, const std::vector<int>& y,
                                const hp_map& hp = {}, std::uint64_t seed = 0);
trained_model fit_logistic(data_view X, const std::vector<int>& y,
                           const hp_map& hp = {});
trained_model fit_knn(data_view X, const std::vector<int>& y,
                      const hp_map& hp = {});
trained_model fit_adaboost(data_view X, const std::vector<int>& y,
                           const hp_map& hp = {});
trained_model fit_gradient_boost(data_view X, const std::vector<int>& y,
                                 const hp_map& hp = {}, std::uint64_t seed = 0);
trained_model fit_xgb(data_view X, const std::vector<int>& y,
                      const hp_map& hp = {}, std::uint64_t seed = 0);

trained_model fit_model(const model_spec& spec, data_view X,
                        const std::vector<int>& y);

// scores in [0,1]; label = score >= 0.5 except KNN, whose exact-0.5 ties
// resolve to class 0
prediction predict(const trained_model& model, data_view X);

// stateless KNN; also what a fitted KNN model runs at predict time
prediction knn_predict(data_view train_X, const std::vector<int>& train_y,
                       data_view query_X, const hp_map& hp = {});

// regularized logistic objective and its analytic gradient, public so the
// gradient can be cross-checked against finite differences
double logistic_loss(data_view X, const std::vector<int>& y,
                     const std::vector<double>& w, double b, double l2);
void logistic_gradient(data_view X, const std::vector<int>& y,
                       const std::vector<double>& w, double b, double l2,
                       std::vector<double>& grad_w, double& grad_b);

data_view view_of(const design_matrix& m);

nlohmann::ordered_json hp_to_json(const hp_map& hp);
hp_map hp_from_json(const nlohmann::json& j);

// versioned document that reloads to bit-identical predictions
nlohmann::ordered_json model_to_json(const trained_model& model);
trained_model model_from_json(const nlohmann::json& j);
void save_model(const trained_model& model, const std::string& path);
trained_model load_model(const std::string& path);

}  // namespace bmt
