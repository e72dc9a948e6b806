#include <fstream>
#include <stdexcept>

#include <bmtkit/learners.hpp>

namespace bmt {

namespace {

nlohmann::ordered_json node_to_json(const tree& t, int idx) {
  const tree_node& n = t[static_cast<std::size_t>(idx)];
  nlohmann::ordered_json j;
  if (n.is_leaf()) {
    j["value"] = n.value;
  } else {
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_to_json(t, n.left);
    j["right"] = node_to_json(t, n.right);
  }
  return j;
}

// preorder, matching the builder's layout, so a save/load/save cycle is
// byte-stable
int node_from_json(const nlohmann::json& j, tree& t) {
  const int idx = static_cast<int>(t.size());
  t.emplace_back();
  if (j.contains("feature")) {
    t[idx].feature = j.at("feature").get<int>();
    t[idx].threshold = j.at("threshold").get<double>();
    const int li = node_from_json(j.at("left"), t);
    const int ri = node_from_json(j.at("right"), t);
    t[idx].left = li;
    t[idx].right = ri;
  } else {
    t[idx].value = j.at("value").get<double>();
  }
  return idx;
}

}  // namespace

nlohmann::ordered_json hp_to_json(const hp_map& hp) {
  auto j = nlohmann::ordered_json::object();
  for (const auto& [key, value] : hp) {
    if (const double* d = std::get_if<double>(&value))
      j[key] = *d;
    else
      j[key] = std::get<std::string>(value);
  }
  return j;
}

hp_map hp_from_json(const nlohmann::json& j) {
  hp_map hp;
  for (const auto& [key, value] : j.items()) {
    if (value.is_number())
      hp[key] = value.get<double>();
    else if (value.is_boolean())
      hp[key] = value.get<bool>() ? 1.0 : 0.0;
    else if (value.is_string())
      hp[key] = value.get<std::string>();
    else
      throw std::invalid_argument("model: hyperparameter '" + key +
                                  "' has an unsupported type");
  }
  return hp;
}

nlohmann::ordered_json model_to_json(const trained_model& m) {
  nlohmann::ordered_json j;
  j["format"] = "bmtkit-model";
  j["version"] = 1;
  j["algorithm"] = algorithm_name(m.spec.algo);
  j["seed"] = m.spec.seed;
  j["hyperparameters"] = hp_to_json(m.spec.hyperparameters);
  j["n_features"] = m.n_features;
  j["base_score"] = m.base_score;
  j["intercept"] = m.intercept;
  j["converged"] = m.converged;
  j["rounds_run"] = m.rounds_run;
  j["coef"] = m.coef;
  j["alphas"] = m.alphas;
  j["loss_trace"] = m.loss_trace;
  j["round_weight_sums"] = m.round_weight_sums;
  auto trees = nlohmann::ordered_json::array();
  for (const tree& t : m.trees) trees.push_back(node_to_json(t, 0));
  j["trees"] = std::move(trees);
  if (m.spec.algo == algorithm::knn)
    j["train"] = {{"n_rows", m.train_X.n_rows},
                  {"n_cols", m.train_X.n_cols},
                  {"values", m.train_X.values},
                  {"labels", m.train_y}};
  return j;
}

trained_model model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", std::string{}) != "bmtkit-model")
    throw std::invalid_argument("model: not a model document");
  const int version = j.at("version").get<int>();
  if (version != 1)
    throw std::invalid_argument("model: unsupported version " +
                                std::to_string(version));
  trained_model m;
  m.spec.algo = algorithm_from_name(j.at("algorithm").get<std::string>());
  m.spec.seed = j.at("seed").get<std::uint64_t>();
  m.spec.hyperparameters = hp_from_json(j.at("hyperparameters"));
  m.n_features = j.at("n_features").get<std::size_t>();
  m.base_score = j.at("base_score").get<double>();
  m.intercept = j.at("intercept").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.rounds_run = j.at("rounds_run").get<std::size_t>();
  m.coef = j.at("coef").get<std::vector<double>>();
  m.alphas = j.at("alphas").get<std::vector<double>>();
  m.loss_trace = j.at("loss_trace").get<std::vector<double>>();
  m.round_weight_sums =
      j.at("round_weight_sums").get<std::vector<double>>();
  for (const auto& tj : j.at("trees")) {
    tree t;
    node_from_json(tj, t);
    m.trees.push_back(std::move(t));
  }
  if (j.contains("train")) {
    const auto& tr = j.at("train");
    m.train_X = dense_matrix(tr.at("n_rows").get<std::size_t>(),
                             tr.at("n_cols").get<std::size_t>());
    m.train_X.values = tr.at("values").get<std::vector<double>>();
    if (m.train_X.values.size() != m.train_X.n_rows * m.train_X.n_cols)
      throw std::invalid_argument("model: stored matrix shape mismatch");
    m.train_y = tr.at("labels").get<std::vector<int>>();
    if (m.train_y.size() != m.train_X.n_rows)
      throw std::invalid_argument("model: stored label count mismatch");
  }
  return m;
}

void save_model(const trained_model& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("model: cannot write '" + path + "'");
  out << model_to_json(m).dump(2) << '\n';
}

trained_model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("model: cannot read '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in);
  return model_from_json(j);
}

}  // namespace bmt
