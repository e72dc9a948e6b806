#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <bmtkit/learners.hpp>
#include <bmtkit/rng.hpp>

using namespace bmt;

namespace {

dense_matrix dm(const std::vector<std::vector<double>>& rows) {
  dense_matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
  return m;
}

struct toy {
  dense_matrix X;
  std::vector<int> y;
};

toy xor_data() {
  return {dm({{0, 0}, {0, 1}, {1, 0}, {1, 1}}), {0, 1, 1, 0}};
}

// two Gaussian-ish blobs either side of x = 0, trivially separable
toy blobs(std::size_t n, std::uint64_t seed) {
  rng gen(seed);
  dense_matrix X(n, 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    double sign = y[i] == 1 ? 1.0 : -1.0;
    X.at(i, 0) = sign * (1.0 + gen.uniform());
    X.at(i, 1) = gen.uniform() * 2.0 - 1.0;
  }
  return {std::move(X), std::move(y)};
}

toy noisy(std::size_t n, std::size_t d, std::uint64_t seed) {
  rng gen(seed);
  dense_matrix X(n, d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) X.at(i, j) = gen.uniform() * 4.0 - 2.0;
    // label follows the first column with 20% flips
    y[i] = X.at(i, 0) > 0.0 ? 1 : 0;
    if (gen.uniform() < 0.2) y[i] = 1 - y[i];
  }
  if (std::count(y.begin(), y.end(), 1) == 0) y[0] = 1;
  if (std::count(y.begin(), y.end(), 0) == 0) y[0] = 0;
  return {std::move(X), std::move(y)};
}

double training_accuracy(const trained_model& m, const toy& t) {
  auto pred = predict(m, t.X.view());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < t.y.size(); ++i)
    hits += static_cast<std::size_t>(pred.labels[i] == t.y[i]);
  return static_cast<double>(hits) / static_cast<double>(t.y.size());
}

}  // namespace

TEST_CASE("spec validation: unknown names and bad ranges are rejected") {
  CHECK_THROWS(validate_spec({algorithm::dt, {{"bogus", 1.0}}, 0}));
  CHECK_THROWS(validate_spec({algorithm::dt, {{"criterion", std::string("mse")}}, 0}));
  CHECK_THROWS(validate_spec({algorithm::knn, {{"k", 0.0}}, 0}));
  CHECK_THROWS(validate_spec({algorithm::lr, {{"l2_strength", -1.0}}, 0}));
  CHECK_THROWS(validate_spec({algorithm::xgb, {{"subsample", 0.0}}, 0}));
  CHECK_THROWS(validate_spec({algorithm::gbc, {{"n_rounds", 2.5}}, 0}));
  CHECK_NOTHROW(validate_spec({algorithm::rf, {{"max_features", std::string("sqrt")}}, 0}));
  CHECK(algorithm_from_name("XGB") == algorithm::xgb);
  CHECK(algorithm_name(algorithm::adb) == "AdB");
  CHECK_THROWS(algorithm_from_name("SVM"));
}

TEST_CASE("dt: learns XOR at depth two and predicts the corners back") {
  auto t = xor_data();
  auto m = fit_cart(t.X.view(), t.y, {{"max_depth", 2.0}});
  CHECK(training_accuracy(m, t) == 1.0);
  auto pred = predict(m, t.X.view());
  CHECK(pred.labels == t.y);
}

TEST_CASE("dt: pure input gives one leaf and perfect recall of it") {
  toy t{dm({{1, 0}, {2, 0}, {3, 0}}), {1, 1, 1}};
  auto m = fit_cart(t.X.view(), t.y);
  CHECK(m.trees.front().size() == 1);
  CHECK(training_accuracy(m, t) == 1.0);
}

TEST_CASE("dt: rejects empty and mismatched input") {
  dense_matrix empty;
  CHECK_THROWS(fit_cart(empty.view(), {}));
  auto t = xor_data();
  std::vector<int> bad{0, 1, 2, 0};
  CHECK_THROWS(fit_cart(t.X.view(), bad));
}

TEST_CASE("rf: degenerate forest equals the plain tree") {
  auto t = noisy(40, 3, 11);
  hp_map forest_hp{{"n_trees", 1.0},
                   {"bootstrap", 0.0},
                   {"max_features", std::string("all")},
                   {"max_depth", 4.0}};
  auto forest = fit_random_forest(t.X.view(), t.y, forest_hp, 7);
  auto cart = fit_cart(t.X.view(), t.y, {{"max_depth", 4.0}});
  auto pf = predict(forest, t.X.view());
  auto pc = predict(cart, t.X.view());
  CHECK(pf.scores == pc.scores);
  CHECK(pf.labels == pc.labels);
}

TEST_CASE("rf: deterministic for a seed, and trees are a prefix of a larger run") {
  auto t = noisy(30, 4, 5);
  auto a = fit_random_forest(t.X.view(), t.y, {{"n_trees", 4.0}}, 42);
  auto b = fit_random_forest(t.X.view(), t.y, {{"n_trees", 4.0}}, 42);
  CHECK(predict(a, t.X.view()).scores == predict(b, t.X.view()).scores);

  auto c = fit_random_forest(t.X.view(), t.y, {{"n_trees", 5.0}}, 42);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(model_to_json(a)["trees"][i] == model_to_json(c)["trees"][i]);

  auto other = fit_random_forest(t.X.view(), t.y, {{"n_trees", 4.0}}, 43);
  CHECK(predict(a, t.X.view()).scores != predict(other, t.X.view()).scores);
}

TEST_CASE("rf: separable blobs train clean") {
  auto t = blobs(20, 3);
  auto m = fit_random_forest(t.X.view(), t.y, {{"n_trees", 50.0}}, 1);
  CHECK(training_accuracy(m, t) == 1.0);
}

TEST_CASE("rf: max_features beyond the column count is an error") {
  auto t = blobs(10, 9);
  CHECK_THROWS(fit_random_forest(t.X.view(), t.y, {{"max_features", 3.0}}, 0));
}

TEST_CASE("lr: zero iterations keep the zero model") {
  auto t = blobs(12, 17);
  auto m = fit_logistic(t.X.view(), t.y, {{"max_iters", 0.0}});
  auto pred = predict(m, t.X.view());
  for (double s : pred.scores) CHECK(s == 0.5);
  for (double w : m.coef) CHECK(w == 0.0);
  CHECK(m.intercept == 0.0);
}

TEST_CASE("lr: separable sign fit orders the scores") {
  toy t{dm({{-1.0}, {1.0}, {-1.0}, {1.0}}), {0, 1, 0, 1}};
  auto m = fit_logistic(t.X.view(), t.y, {{"l2_strength", 0.0}});
  auto pred = predict(m, t.X.view());
  CHECK(pred.scores[1] > 0.5);
  CHECK(pred.scores[0] < 0.5);
}

TEST_CASE("lr: converges on scaled data and says so") {
  auto t = blobs(40, 23);
  auto m = fit_logistic(t.X.view(), t.y, {{"l2_strength", 0.1}});
  CHECK(m.converged);
  CHECK(training_accuracy(m, t) == 1.0);
}

TEST_CASE("lr: analytic gradient matches central finite differences") {
  rng gen(404);
  for (int trial = 0; trial < 20; ++trial) {
    dense_matrix X(5, 3);
    std::vector<int> y(5);
    for (std::size_t i = 0; i < 5; ++i) {
      y[i] = static_cast<int>(gen.below(2));
      for (std::size_t j = 0; j < 3; ++j)
        X.at(i, j) = gen.uniform() * 4.0 - 2.0;
    }
    std::vector<double> w(3);
    for (auto& v : w) v = gen.uniform() * 2.0 - 1.0;
    double b = gen.uniform() * 2.0 - 1.0;
    double l2 = gen.uniform();

    std::vector<double> gw;
    double gb;
    logistic_gradient(X.view(), y, w, b, l2, gw, gb);

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<double> lo = w, hi = w;
      lo[j] -= h;
      hi[j] += h;
      double fd = (logistic_loss(X.view(), y, hi, b, l2) -
                   logistic_loss(X.view(), y, lo, b, l2)) /
                  (2.0 * h);
      worst = std::max(worst, std::abs(fd - gw[j]));
    }
    double fdb = (logistic_loss(X.view(), y, w, b + h, l2) -
                  logistic_loss(X.view(), y, w, b - h, l2)) /
                 (2.0 * h);
    worst = std::max(worst, std::abs(fdb - gb));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("knn: exact-match query returns that row's label") {
  toy t{dm({{0, 0}, {1, 0}, {0, 1}}), {0, 0, 1}};
  auto q = dm({{0, 1}});
  auto pred = knn_predict(t.X.view(), t.y, q.view(), {{"k", 1.0}});
  CHECK(pred.labels[0] == 1);
  CHECK(pred.scores[0] == 1.0);
}

TEST_CASE("knn: hand-computed three-neighbor vote") {
  toy t{dm({{0, 0}, {1, 0}, {0, 1}}), {0, 0, 1}};
  auto q = dm({{0.9, 0.1}});
  auto pred = knn_predict(t.X.view(), t.y, q.view(), {{"k", 3.0}});
  CHECK(pred.labels[0] == 0);
  CHECK(pred.scores[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("knn: full-vote k scores the global positive fraction") {
  auto t = noisy(20, 2, 77);
  double fraction =
      static_cast<double>(std::count(t.y.begin(), t.y.end(), 1)) / 20.0;
  auto pred = knn_predict(t.X.view(), t.y, t.X.view(), {{"k", 20.0}});
  for (double s : pred.scores) CHECK(s == doctest::Approx(fraction).epsilon(1e-15));
}

TEST_CASE("knn: distance ties go to the lower training index") {
  toy t{dm({{1, 0}, {-1, 0}}), {1, 0}};
  auto q = dm({{0, 0}});
  auto pred = knn_predict(t.X.view(), t.y, q.view(), {{"k", 1.0}});
  CHECK(pred.labels[0] == 1);  // row 0 wins the tie
}

TEST_CASE("knn: an exact 0.5 vote resolves to class 0") {
  toy t{dm({{-1, 0}, {1, 0}}), {0, 1}};
  auto q = dm({{0, 0.5}});
  auto pred = knn_predict(t.X.view(), t.y, q.view(), {{"k", 2.0}});
  CHECK(pred.scores[0] == 0.5);
  CHECK(pred.labels[0] == 0);
}

TEST_CASE("knn: inverse-distance weighting lets an exact match dominate") {
  toy t{dm({{0, 0}, {5, 5}, {6, 6}}), {1, 0, 0}};
  auto q = dm({{0, 0}});
  hp_map hp{{"k", 3.0}, {"weighting", std::string("inverse_distance")}};
  auto pred = knn_predict(t.X.view(), t.y, q.view(), hp);
  CHECK(pred.labels[0] == 1);
  CHECK(pred.scores[0] > 0.999);
}

TEST_CASE("knn: k out of range is an error") {
  auto t = blobs(6, 2);
  CHECK_THROWS(knn_predict(t.X.view(), t.y, t.X.view(), {{"k", 7.0}}));
}

TEST_CASE("adb: stump-separable data stops at one perfect round") {
  auto t = blobs(16, 4);
  auto m = fit_adaboost(t.X.view(), t.y, {{"n_rounds", 10.0}});
  CHECK(m.rounds_run == 1);
  CHECK(m.alphas.size() == 1);
  CHECK(m.alphas[0] == doctest::Approx(std::log(1e10)).epsilon(1e-12));
  CHECK(training_accuracy(m, t) == 1.0);
}

TEST_CASE("adb: every stump on XOR is a coin flip, so no rounds survive") {
  auto t = xor_data();
  auto m = fit_adaboost(t.X.view(), t.y, {{"n_rounds", 20.0}});
  CHECK(m.rounds_run == 0);
  CHECK(m.alphas.empty());
  auto pred = predict(m, t.X.view());
  for (double s : pred.scores) CHECK(s == 0.5);  // majority fallback, tied classes
}

TEST_CASE("adb: weights stay normalized after every kept round") {
  auto t = noisy(60, 3, 9);
  auto m = fit_adaboost(t.X.view(), t.y, {{"n_rounds", 30.0}});
  CHECK(m.rounds_run >= 2);
  for (double s : m.round_weight_sums) CHECK(std::abs(s - 1.0) <= 1e-12);
  for (double a : m.alphas) CHECK(a > 0.0);  // kept rounds all had eps < 0.5
}

TEST_CASE("gbc: zero learning rate freezes the base rate") {
  auto t = noisy(24, 2, 13);
  double rate =
      static_cast<double>(std::count(t.y.begin(), t.y.end(), 1)) / 24.0;
  auto m = fit_gradient_boost(t.X.view(), t.y,
                              {{"n_rounds", 5.0}, {"learning_rate", 0.0}});
  auto pred = predict(m, t.X.view());
  for (double s : pred.scores) CHECK(s == doctest::Approx(rate).epsilon(1e-12));
}

TEST_CASE("gbc: depth-one Newton leaves take the sign of their class") {
  toy t{dm({{0.0}, {1.0}, {2.0}, {3.0}}), {0, 0, 1, 1}};
  auto m = fit_gradient_boost(t.X.view(), t.y,
                              {{"n_rounds", 1.0}, {"max_depth", 1.0}});
  const tree& first = m.trees.front();
  REQUIRE(!first[0].is_leaf());
  double left = first[first[0].left].value;
  double right = first[first[0].right].value;
  CHECK(left < 0.0);   // x <= threshold side is the negative class
  CHECK(right > 0.0);
}

TEST_CASE("gbc: training deviance never increases at small learning rates") {
  rng gen(888);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = noisy(50, 5, 1000 + static_cast<std::uint64_t>(trial));
    auto m = fit_gradient_boost(
        t.X.view(), t.y, {{"n_rounds", 25.0}, {"learning_rate", 0.1}});
    REQUIRE(m.loss_trace.size() == 26);
    for (std::size_t i = 1; i < m.loss_trace.size(); ++i)
      CHECK(m.loss_trace[i] <= m.loss_trace[i - 1] + 1e-12);
  }
}

TEST_CASE("gbc: single-class labels are rejected") {
  toy t{dm({{0.0}, {1.0}}), {1, 1}};
  CHECK_THROWS(fit_gradient_boost(t.X.view(), t.y));
}

TEST_CASE("xgb: crushing regularization returns the base-rate predictor") {
  auto t = noisy(30, 3, 21);
  double rate =
      static_cast<double>(std::count(t.y.begin(), t.y.end(), 1)) / 30.0;
  auto m = fit_xgb(t.X.view(), t.y, {{"n_rounds", 5.0}, {"lambda", 1e9}});
  auto pred = predict(m, t.X.view());
  for (double s : pred.scores)
    CHECK(s == doctest::Approx(rate).epsilon(1e-6));
}

TEST_CASE("xgb: fits separable data and stays deterministic") {
  auto t = blobs(24, 31);
  hp_map hp{{"n_rounds", 20.0}, {"subsample", 0.8}, {"colsample", 0.8}};
  auto a = fit_xgb(t.X.view(), t.y, hp, 5);
  auto b = fit_xgb(t.X.view(), t.y, hp, 5);
  CHECK(training_accuracy(a, t) == 1.0);
  CHECK(predict(a, t.X.view()).scores == predict(b, t.X.view()).scores);
}

TEST_CASE("xgb: deviance trace is recorded from the base score on") {
  auto t = noisy(40, 3, 33);
  auto m = fit_xgb(t.X.view(), t.y, {{"n_rounds", 8.0}});
  REQUIRE(m.loss_trace.size() == 9);
  CHECK(m.loss_trace.back() < m.loss_trace.front());
}

TEST_CASE("predict: width mismatch is an error") {
  auto t = blobs(10, 41);
  auto m = fit_cart(t.X.view(), t.y);
  dense_matrix wide(2, 3);
  CHECK_THROWS(predict(m, wide.view()));
}

TEST_CASE("fit_model: dispatch matches the direct entry points") {
  auto t = noisy(30, 3, 51);
  model_spec spec{algorithm::rf, {{"n_trees", 10.0}}, 99};
  auto via_spec = fit_model(spec, t.X.view(), t.y);
  auto direct = fit_random_forest(t.X.view(), t.y, {{"n_trees", 10.0}}, 99);
  CHECK(predict(via_spec, t.X.view()).scores ==
        predict(direct, t.X.view()).scores);
  CHECK(via_spec.spec.seed == 99);
}

TEST_CASE("serialization: every algorithm reloads to identical predictions") {
  auto t = noisy(26, 4, 61);
  auto probe = noisy(9, 4, 62);
  for (algorithm a : all_algorithms) {
    model_spec spec{a, {}, 3};
    if (a == algorithm::gbc || a == algorithm::xgb)
      spec.hyperparameters["n_rounds"] = 10.0;
    if (a == algorithm::rf) spec.hyperparameters["n_trees"] = 12.0;
    auto m = fit_model(spec, t.X.view(), t.y);
    auto j = model_to_json(m);
    auto back = model_from_json(nlohmann::json::parse(j.dump()));
    auto p1 = predict(m, probe.X.view());
    auto p2 = predict(back, probe.X.view());
    CHECK(p1.scores == p2.scores);
    CHECK(p1.labels == p2.labels);
    // a second trip through text must not drift a byte
    CHECK(model_to_json(back).dump() == j.dump());
  }
}

TEST_CASE("serialization: file round trip and version gate") {
  auto t = blobs(14, 71);
  auto m = fit_cart(t.X.view(), t.y, {{"max_depth", 3.0}});
  std::string path = "test_model_roundtrip.json";
  save_model(m, path);
  auto back = load_model(path);
  CHECK(predict(back, t.X.view()).scores == predict(m, t.X.view()).scores);
  std::remove(path.c_str());

  auto j = model_to_json(m);
  j["version"] = 99;
  CHECK_THROWS(model_from_json(nlohmann::json::parse(j.dump())));
  nlohmann::json stray{{"format", "something-else"}};
  CHECK_THROWS(model_from_json(stray));
}
