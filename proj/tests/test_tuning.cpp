#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include <bmtkit/rng.hpp>
#include <bmtkit/tuning.hpp>

using namespace bmt;

namespace {

struct toy {
  dense_matrix X;
  std::vector<int> y;
};

toy noisy(std::size_t n, std::size_t d, std::uint64_t seed) {
  rng gen(seed);
  dense_matrix X(n, d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) X.at(i, j) = gen.uniform() * 4.0 - 2.0;
    y[i] = X.at(i, 0) > 0.0 ? 1 : 0;
    if (gen.uniform() < 0.2) y[i] = 1 - y[i];
  }
  y[0] = 1;
  y[1] = 0;
  return {std::move(X), std::move(y)};
}

// the four XOR corners replicated in rotation: the only split candidates
// are the two midlines, so a stump stays at chance while two levels are
// exact, in every fold
toy replicated_xor(std::size_t n) {
  dense_matrix X(n, 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    int a = static_cast<int>(i / 2 % 2), b = static_cast<int>(i % 2);
    X.at(i, 0) = a;
    X.at(i, 1) = b;
    y[i] = a ^ b;
  }
  return {std::move(X), std::move(y)};
}

std::vector<int> binary_labels(std::size_t n_pos, std::size_t n_neg) {
  std::vector<int> y;
  for (std::size_t i = 0; i < n_pos; ++i) y.push_back(1);
  for (std::size_t i = 0; i < n_neg; ++i) y.push_back(0);
  return y;
}

}  // namespace

TEST_CASE("kfold: folds partition the rows with balanced sizes and classes") {
  auto y = binary_labels(85, 64);  // 149 rows
  auto folds = kfold_indices(149, 10, y, 7);
  REQUIRE(folds.size() == 10);

  std::vector<std::size_t> sizes;
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    sizes.push_back(f.size());
    for (std::size_t idx : f) {
      CHECK(idx < 149);
      CHECK(seen.insert(idx).second);  // no index lands twice
    }
    CHECK(std::is_sorted(f.begin(), f.end()));
  }
  CHECK(seen.size() == 149);
  CHECK(std::count(sizes.begin(), sizes.end(), 15) == 9);
  CHECK(std::count(sizes.begin(), sizes.end(), 14) == 1);

  for (const auto& f : folds) {
    double positives = 0;
    for (std::size_t idx : f) positives += y[idx];
    double proportional = 85.0 * static_cast<double>(f.size()) / 149.0;
    CHECK(std::abs(positives - proportional) <= 1.0);
  }
}

TEST_CASE("kfold: deterministic under a seed, shuffled across seeds") {
  auto y = binary_labels(30, 30);
  CHECK(kfold_indices(60, 5, y, 3) == kfold_indices(60, 5, y, 3));
  CHECK(kfold_indices(60, 5, y, 3) != kfold_indices(60, 5, y, 4));
}

TEST_CASE("kfold: k equal to n gives singletons via the unstratified fallback") {
  auto y = binary_labels(5, 5);
  std::vector<std::string> warnings;
  auto folds = kfold_indices(10, 10, y, 1, &warnings);
  REQUIRE(folds.size() == 10);
  for (const auto& f : folds) CHECK(f.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("unstratified") != std::string::npos);
}

TEST_CASE("kfold: bad requests throw") {
  auto y = binary_labels(4, 4);
  CHECK_THROWS(kfold_indices(8, 9, y, 0));   // more folds than rows
  CHECK_THROWS(kfold_indices(8, 1, y, 0));   // degenerate fold count
  CHECK_THROWS(kfold_indices(9, 3, y, 0));   // label length mismatch
}

TEST_CASE("expand_grid: first name slowest, counts multiply") {
  param_grid g{{"a", {1.0, 2.0}}, {"b", {std::string("x"), std::string("y")}}};
  auto configs = expand_grid(g);
  REQUIRE(configs.size() == 4);
  CHECK(std::get<double>(configs[0]["a"]) == 1.0);
  CHECK(std::get<std::string>(configs[0]["b"]) == "x");
  CHECK(std::get<double>(configs[1]["a"]) == 1.0);
  CHECK(std::get<std::string>(configs[1]["b"]) == "y");
  CHECK(std::get<double>(configs[2]["a"]) == 2.0);
  CHECK(std::get<std::string>(configs[2]["b"]) == "x");
  CHECK(std::get<double>(configs[3]["a"]) == 2.0);

  CHECK(expand_grid({{"a", {1.0, 2.0, 3.0}}}).size() == 3);
  auto empty = expand_grid({});
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].empty());
  CHECK_THROWS(expand_grid({{"a", {}}}));
}

TEST_CASE("grid_search: a single config comes back with its fold mean") {
  auto t = noisy(60, 3, 11);
  param_grid g{{"max_depth", {3.0}}};
  auto out = grid_search(algorithm::dt, g, t.X.view(), t.y, 5, 42);
  REQUIRE(out.results.size() == 1);
  REQUIRE(out.results[0].fold_scores.size() == 5);
  CHECK(out.best_index == 0);
  CHECK(out.best_config == out.results[0].config);

  double sum = 0.0;
  for (double s : out.results[0].fold_scores) sum += s;
  CHECK(out.results[0].mean_score == doctest::Approx(sum / 5.0).epsilon(1e-15));
  CHECK(out.results[0].fit_time_seconds >= 0.0);
  CHECK(out.total_seconds >= 0.0);
}

TEST_CASE("grid_search: depth two is the least tree that cracks replicated xor") {
  auto t = replicated_xor(40);
  param_grid g{{"max_depth", {1.0, 3.0}}};
  auto out = grid_search(algorithm::dt, g, t.X.view(), t.y, 5, 42);
  REQUIRE(out.results.size() == 2);
  CHECK(out.results[0].mean_score < 0.75);  // stumps hover near chance
  CHECK(out.results[1].mean_score == 1.0);
  CHECK(std::get<double>(out.best_config.at("max_depth")) == 3.0);
}

TEST_CASE("grid_search: best is the earliest argmax over the scan") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    auto t = noisy(50, 3, 100 + seed);
    param_grid g{{"max_depth", {1.0, 2.0, 3.0}}, {"min_samples_split", {2.0, 8.0}}};
    auto out = grid_search(algorithm::dt, g, t.X.view(), t.y, 5, seed);
    REQUIRE(out.results.size() == 6);
    std::size_t first_argmax = 0;
    for (std::size_t c = 0; c < out.results.size(); ++c) {
      CHECK(out.results[out.best_index].mean_score >= out.results[c].mean_score);
      if (out.results[c].mean_score >
          out.results[first_argmax].mean_score)
        first_argmax = c;
    }
    CHECK(out.best_index == first_argmax);
  }
}

TEST_CASE("grid_search: reruns and thread pools reproduce every score") {
  auto t = noisy(48, 3, 17);
  param_grid g{{"n_trees", {5.0, 10.0}}, {"max_depth", {3.0}}};
  auto a = grid_search(algorithm::rf, g, t.X.view(), t.y, 4, 9, "accuracy", 1);
  auto b = grid_search(algorithm::rf, g, t.X.view(), t.y, 4, 9, "accuracy", 1);
  auto c = grid_search(algorithm::rf, g, t.X.view(), t.y, 4, 9, "accuracy", 4);
  REQUIRE(a.results.size() == 2);
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    CHECK(a.results[i].fold_scores == b.results[i].fold_scores);
    CHECK(a.results[i].fold_scores == c.results[i].fold_scores);
    CHECK(a.results[i].config == c.results[i].config);
  }
  CHECK(a.best_index == c.best_index);
  CHECK(a.best_config == c.best_config);
}

TEST_CASE("grid_search: a fit failure names the config and fold") {
  auto t = noisy(30, 3, 23);
  // passes spec validation, blows up at fit time: only 3 columns exist
  param_grid g{{"max_features", {2.0, 5.0}}};
  try {
    grid_search(algorithm::rf, g, t.X.view(), t.y, 3, 1);
    FAIL("expected the search to abort");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("config 1") != std::string::npos);
    CHECK(msg.find("fold 0") != std::string::npos);
  }
}

TEST_CASE("grid_search: rejects scorings it does not implement") {
  auto t = noisy(20, 2, 31);
  CHECK_THROWS(grid_search(algorithm::dt, {}, t.X.view(), t.y, 4, 0, "f1"));
}

TEST_CASE("default grids: documented sizes, every config validates") {
  CHECK(expand_grid(default_grid(algorithm::dt)).size() == 30);
  CHECK(expand_grid(default_grid(algorithm::rf)).size() == 18);
  CHECK(expand_grid(default_grid(algorithm::lr)).size() == 5);
  CHECK(expand_grid(default_grid(algorithm::knn)).size() == 10);
  CHECK(expand_grid(default_grid(algorithm::gbc)).size() == 18);
  CHECK(expand_grid(default_grid(algorithm::adb)).size() == 9);
  CHECK(expand_grid(default_grid(algorithm::xgb)).size() == 54);
  for (algorithm a : all_algorithms)
    for (const auto& config : expand_grid(default_grid(a)))
      CHECK_NOTHROW(validate_spec({a, config, 0}));
}

TEST_CASE("grid json: arrays, scalar shorthand, and junk") {
  auto g = grid_from_json(nlohmann::json::parse(
      R"({"max_depth": [2, 4], "criterion": "gini"})"));
  CHECK(g.size() == 2);
  CHECK(g["max_depth"].size() == 2);
  REQUIRE(g["criterion"].size() == 1);
  CHECK(std::get<std::string>(g["criterion"][0]) == "gini");
  CHECK_THROWS(grid_from_json(nlohmann::json::parse(R"({"a": []})")));
  CHECK_THROWS(grid_from_json(nlohmann::json::parse(R"({"a": [[1]]})")));
  CHECK_THROWS(grid_from_json(nlohmann::json::parse(R"([1,2])")));
}

TEST_CASE("outcome serialization: json fields and csv shape") {
  auto t = noisy(40, 2, 37);
  param_grid g{{"k", {3.0, 5.0}}};
  auto out = grid_search(algorithm::knn, g, t.X.view(), t.y, 4, 5);

  auto j = outcome_to_json(out);
  CHECK(j["results"].size() == 2);
  CHECK(j["results"][0]["fold_scores"].size() == 4);
  CHECK(j["best_config"] == hp_to_json(out.best_config));
  CHECK(j.contains("total_seconds"));

  std::ostringstream csv;
  write_outcome_csv(out, csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "config,params,fold_1,fold_2,fold_3,fold_4,mean,std,seconds");
  std::getline(lines, line);
  CHECK(line.find("0,k=3") == 0);
  std::getline(lines, line);
  CHECK(line.find("1,k=5") == 0);
  CHECK(!std::getline(lines, line));
}

TEST_CASE("cv results: mean and deviation recompute from the fold scores") {
  auto t = noisy(45, 3, 41);
  param_grid g{{"l2_strength", {0.1, 1.0}}};
  auto out = grid_search(algorithm::lr, g, t.X.view(), t.y, 5, 2);
  for (const auto& r : out.results) {
    double sum = 0.0;
    for (double s : r.fold_scores) sum += s;
    double mean = sum / static_cast<double>(r.fold_scores.size());
    double ss = 0.0;
    for (double s : r.fold_scores) ss += (s - mean) * (s - mean);
    CHECK(r.mean_score == doctest::Approx(mean).epsilon(1e-15));
    CHECK(r.std_score ==
          doctest::Approx(std::sqrt(ss / r.fold_scores.size())).epsilon(1e-15));
  }
}
