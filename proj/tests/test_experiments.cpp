#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "bmtkit/experiments.hpp"

using namespace bmt;

namespace {

const std::string kData = std::string(BMT_DATA_DIR) + "/bone_marrow.arff";

nlohmann::json strip_timing(nlohmann::json j) {
  j.erase("total_seconds");
  for (auto& m : j["models"]) m.erase("search_seconds");
  return j;
}

}  // namespace

TEST_CASE("presets cover the four designs") {
  auto a = experiment_preset("A", kData);
  CHECK(a.id == "A");
  CHECK(a.feature_mode == "full");
  CHECK_FALSE(a.hpo.enabled);
  CHECK(a.models.size() == 7);
  CHECK(a.split.ratio == doctest::Approx(0.2));
  CHECK(a.split.seed == 42);
  CHECK(a.split.stratified);

  auto b = experiment_preset("B", kData);
  CHECK(b.feature_mode == "full");
  CHECK(b.hpo.enabled);
  CHECK(b.hpo.k_folds == 10);

  auto c = experiment_preset("C", kData);
  CHECK(c.feature_mode == "top_k");
  CHECK(c.top_k == 11);
  CHECK_FALSE(c.hpo.enabled);

  auto d = experiment_preset("D", kData);
  CHECK(d.feature_mode == "top_k");
  CHECK(d.top_k == 11);
  CHECK(d.hpo.enabled);

  CHECK_THROWS(experiment_preset("E", kData));
}

TEST_CASE("config json round trip") {
  auto cfg = experiment_preset("D", kData);
  cfg.hpo.grids["DT"] = {{"max_depth", {2.0, 4.0}}};
  cfg.drop_leaky = true;
  auto j = config_to_json(cfg);
  auto back = config_to_json(config_from_json(j));
  CHECK(j == back);
  CHECK(j["experiment"] == "D");
  CHECK(j["hpo"]["grids"]["DT"]["max_depth"][0] == 2.0);
}

TEST_CASE("config json rejects unknown fields") {
  auto j = config_to_json(experiment_preset("A", kData));
  j["seeed"] = 1;
  CHECK_THROWS_WITH_AS(config_from_json(j), "config: unknown field 'seeed'",
                       std::invalid_argument);
  auto j2 = config_to_json(experiment_preset("A", kData));
  j2["split"]["rato"] = 0.3;
  CHECK_THROWS(config_from_json(j2));
}

TEST_CASE("config json rejects bad model names") {
  auto j = config_to_json(experiment_preset("A", kData));
  j["models"] = {"DT", "SVM"};
  CHECK_THROWS(config_from_json(j));
}

TEST_CASE("outcome-adjacent columns are the leaky set") {
  auto leaky = leaky_columns();
  CHECK(leaky.size() == 8);
  std::set<std::string> s(leaky.begin(), leaky.end());
  CHECK(s.count("survival_time") == 1);
  CHECK(s.count("PLT_recovery") == 1);
  CHECK(s.count("extensive_chronic_GvHD") == 1);
  CHECK(s.count("survival_status") == 0);
}

TEST_CASE("run_experiment: defaults on the bundled table") {
  auto cfg = experiment_preset("A", kData);
  cfg.models = {algorithm::dt, algorithm::knn};
  auto r = run_experiment(cfg);

  CHECK(r.n_train == 149);
  CHECK(r.n_test == 38);
  CHECK(r.n_features == 58);
  CHECK(r.ranking.entries.size() == 58);
  CHECK(r.features_used.size() == 58);
  CHECK(r.models.size() == 2);
  for (const auto& m : r.models) {
    CHECK_FALSE(m.tuned);
    auto c = m.confusion;
    CHECK(c.tp + c.tn + c.fp + c.fn == 38);
    CHECK(m.metrics.accuracy > 0.5);
    CHECK(m.roc_auc > 0.5);
    CHECK(m.roc.size() >= 2);
  }
  CHECK(r.ranking.entries.front().column == "PLT_recovery");
  CHECK(r.dataset_checksum.rfind("fnv1a:", 0) == 0);
  CHECK(r.grid_hashes.empty());
  CHECK(r.total_seconds > 0.0);
}

TEST_CASE("run_experiment: byte-identical reports modulo timing") {
  auto cfg = experiment_preset("A", kData);
  cfg.models = {algorithm::dt, algorithm::lr};
  auto j1 = strip_timing(report_to_json(run_experiment(cfg)));
  auto j2 = strip_timing(report_to_json(run_experiment(cfg)));
  CHECK(j1.dump() == j2.dump());
}

TEST_CASE("run_experiment: selecting every feature changes nothing") {
  // selection reorders columns, so use a model whose predictions cannot
  // depend on column order
  auto cfg = experiment_preset("A", kData);
  cfg.models = {algorithm::knn};
  auto full = run_experiment(cfg);

  cfg.feature_mode = "top_k";
  cfg.top_k = 58;
  auto all = run_experiment(cfg);

  CHECK(all.n_features == 58);
  std::set<std::string> fa(full.features_used.begin(),
                           full.features_used.end());
  std::set<std::string> fb(all.features_used.begin(), all.features_used.end());
  CHECK(fa == fb);
  CHECK(full.models[0].metrics.accuracy ==
        doctest::Approx(all.models[0].metrics.accuracy).epsilon(1e-12));
  CHECK(full.models[0].confusion.tp == all.models[0].confusion.tp);
  CHECK(full.models[0].confusion.fn == all.models[0].confusion.fn);
}

TEST_CASE("run_experiment: top_k feature lists nest") {
  auto cfg = experiment_preset("C", kData);
  cfg.models = {algorithm::knn};
  cfg.top_k = 5;
  auto five = run_experiment(cfg);
  cfg.top_k = 11;
  auto eleven = run_experiment(cfg);

  REQUIRE(five.features_used.size() == 5);
  REQUIRE(eleven.features_used.size() == 11);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(five.features_used[i] == eleven.features_used[i]);
  CHECK(five.features_used[0] == "PLT_recovery");
}

TEST_CASE("run_experiment: drop_leaky removes outcome-adjacent columns") {
  auto cfg = experiment_preset("A", kData);
  cfg.models = {algorithm::dt};
  cfg.drop_leaky = true;
  auto r = run_experiment(cfg);

  CHECK(r.n_features < 58);
  for (const auto& e : r.ranking.entries) {
    CHECK(e.column != "PLT_recovery");
    CHECK(e.column.rfind("acute_GvHD_III_IV", 0) != 0);
  }
  for (const auto& f : r.features_used) CHECK(f != "survival_time");
}

TEST_CASE("run_experiment: validates its inputs") {
  auto cfg = experiment_preset("A", kData);
  cfg.models = {};
  CHECK_THROWS(run_experiment(cfg));

  cfg = experiment_preset("A", kData);
  cfg.feature_mode = "some";
  CHECK_THROWS(run_experiment(cfg));

  cfg = experiment_preset("A", kData);
  cfg.split.ratio = 1.0;
  CHECK_THROWS(run_experiment(cfg));

  cfg = experiment_preset("A", "/nonexistent/file.arff");
  cfg.models = {algorithm::dt};
  try {
    run_experiment(cfg);
    FAIL("expected an ingest error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).rfind("ingest:", 0) == 0);
  }
}

TEST_CASE("report json round trip") {
  auto cfg = experiment_preset("A", kData);
  cfg.models = {algorithm::dt, algorithm::adb};
  auto r = run_experiment(cfg);
  auto j = report_to_json(r);
  CHECK(j["format"] == "bmtkit-report");
  auto back = report_from_json(j);
  CHECK(report_to_json(back).dump() == j.dump());

  // +infinity threshold survives the null round trip
  REQUIRE(!back.models.empty());
  CHECK(std::isinf(back.models[0].roc.thresholds[0]));

  auto bad = j;
  bad["version"] = 99;
  CHECK_THROWS(report_from_json(bad));
}

TEST_CASE("tuned run records search artifacts and beats nothing silently") {
  auto cfg = experiment_preset("B", kData);
  cfg.models = {algorithm::dt};
  cfg.hpo.grids["DT"] = {{"max_depth", {2.0, 4.0}}};
  auto r = run_experiment(cfg);

  REQUIRE(r.models.size() == 1);
  CHECK(r.models[0].tuned);
  CHECK(r.models[0].cv_mean_accuracy > 0.5);
  CHECK(r.models[0].search_seconds > 0.0);
  CHECK(r.models[0].chosen_hp.count("max_depth") == 1);
  CHECK(r.grid_hashes.count("DT") == 1);
  CHECK(r.grid_hashes.at("DT").rfind("fnv1a:", 0) == 0);

  auto j = report_to_json(r);
  CHECK(j["models"][0]["tuned"] == true);
  CHECK(j["models"][0].contains("cv_mean_accuracy"));
}

TEST_CASE("compare_experiments summarizes and tracks search times") {
  auto a = experiment_preset("A", kData);
  a.models = {algorithm::dt, algorithm::knn};
  auto ra = run_experiment(a);

  auto d = experiment_preset("D", kData);
  d.models = {algorithm::dt, algorithm::knn};
  d.hpo.grids["DT"] = {{"max_depth", {2.0, 4.0}}};
  d.hpo.grids["KNN"] = {{"k", {3.0, 5.0}}};
  auto rd = run_experiment(d);

  CHECK_THROWS(compare_experiments({ra}));

  auto table = compare_experiments({ra, rd});
  REQUIRE(table.max_metrics.size() == 2);
  CHECK(table.max_metrics[0].experiment == "A");
  CHECK(table.max_metrics[1].experiment == "D");
  CHECK(table.max_metrics[0].accuracy ==
        std::max(ra.models[0].metrics.accuracy, ra.models[1].metrics.accuracy));
  REQUIRE(table.tuned_experiments == std::vector<std::string>{"D"});
  REQUIRE(!table.search_times.empty());
  bool saw_dt = false;
  for (const auto& row : table.search_times)
    if (row.algo == "DT") {
      saw_dt = true;
      REQUIRE(row.seconds.size() == 1);
      CHECK(row.seconds[0] > 0.0);
    }
  CHECK(saw_dt);

  auto j = comparison_to_json(table);
  CHECK(j["best_metrics"].size() == 2);
  CHECK(j["tuned_experiments"][0] == "D");

  std::ostringstream text;
  print_comparison(table, text);
  auto s = text.str();
  CHECK(s.find("best metric per experiment") != std::string::npos);
  CHECK(s.find("grid search seconds") != std::string::npos);
  CHECK(s.find("DT") != std::string::npos);
}

TEST_CASE("emit_report writes the requested artifact set") {
  auto cfg = experiment_preset("A", kData);
  cfg.models = {algorithm::dt, algorithm::knn};
  auto r = run_experiment(cfg);

  auto dir = std::filesystem::temp_directory_path() / "bmt_report_test";
  std::filesystem::remove_all(dir);
  auto written = emit_report(r, {"json", "csv", "svg"}, dir.string());

  std::set<std::string> names;
  for (const auto& p : written)
    names.insert(std::filesystem::path(p).filename().string());
  CHECK(names.count("report.json") == 1);
  CHECK(names.count("metrics.csv") == 1);
  CHECK(names.count("ranking.csv") == 1);
  CHECK(names.count("roc_DT.csv") == 1);
  CHECK(names.count("roc_KNN.csv") == 1);
  CHECK(names.count("roc_overlay.svg") == 1);
  CHECK(names.count("metric_bars.svg") == 1);
  CHECK(names.count("search_times.svg") == 0);  // hpo off
  for (const auto& p : written) CHECK(std::filesystem::exists(p));

  std::ifstream json_in(dir / "report.json");
  auto parsed = nlohmann::ordered_json::parse(json_in);
  CHECK(report_to_json(report_from_json(parsed)).dump() == parsed.dump());

  std::ifstream svg_in(dir / "roc_overlay.svg");
  std::string first_line;
  std::getline(svg_in, first_line);
  CHECK(first_line.rfind("<svg", 0) == 0);

  std::ifstream csv_in(dir / "metrics.csv");
  std::getline(csv_in, first_line);
  CHECK(first_line == "model,accuracy,precision,recall,f1,roc_auc");

  CHECK_THROWS(emit_report(r, {"pdf"}, dir.string()));
  std::filesystem::remove_all(dir);
}
