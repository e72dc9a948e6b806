#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bmtkit/experiments.hpp"

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_ingest(const std::string& path) {
  auto ds = bmt::load_table(path);
  print_warnings(ds.warnings);
  std::printf("%s: %zu rows, %zu columns\n", ds.relation.c_str(), ds.n_rows,
              ds.n_cols());
  std::printf("%-28s %8s %14s %14s %14s %14s\n", "column", "present", "min",
              "max", "mean", "std");
  for (const auto& s : bmt::summarize_numeric(ds))
    std::printf("%-28s %8zu %14.4f %14.4f %14.4f %14.4f\n", s.column.c_str(),
                s.n_present, s.minimum, s.maximum, s.mean,
                s.standard_deviation);
  return 0;
}

int cmd_rank(const std::string& path, const std::string& target,
             const std::string& positive, bool drop_leaky, std::size_t top_k,
             const std::string& out_csv) {
  auto ds = bmt::load_table(path);
  ds.set_target(target);
  auto imputed = bmt::apply_imputer(ds, bmt::fit_imputer(ds));
  auto matrix = bmt::apply_encoding(imputed, bmt::fit_encoding(imputed),
                                    target, positive);
  if (drop_leaky) matrix = bmt::strip_leaky(matrix);
  print_warnings(matrix.warnings);
  auto ranking = bmt::rank_features(matrix);

  std::size_t shown = ranking.entries.size();
  if (top_k > 0 && top_k < shown) shown = top_k;
  std::printf("%4s %-36s %16s\n", "rank", "attribute", "score");
  for (std::size_t i = 0; i < shown; ++i)
    std::printf("%4zu %-36s %16.4f\n", i + 1,
                ranking.entries[i].column.c_str(), ranking.entries[i].score);

  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + out_csv + "'");
    bmt::write_ranking_csv(ranking, out);
    std::printf("wrote %s\n", out_csv.c_str());
  }
  return 0;
}

struct run_flags {
  std::string experiment = "A";
  std::string config_path;
  std::string dataset;
  std::string out_dir;
  std::string formats = "json,csv,svg";
  long seed = 0;
  std::size_t top_k = 0;
  int threads = 0;
  bool drop_leaky = false;
};

int cmd_run(const CLI::App& cmd, const run_flags& f) {
  // precedence: preset defaults, then the config file, then explicit flags
  auto base = bmt::config_to_json(
      bmt::experiment_preset(f.experiment, "data/bone_marrow.arff"));
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in)
      throw std::runtime_error("cannot read config '" + f.config_path + "'");
    // bind before items(): iterating a temporary's items() is use-after-free
    auto file = nlohmann::json::parse(in);
    for (auto& [key, value] : file.items()) base[key] = value;
  }
  auto cfg = bmt::config_from_json(base);

  if (cmd.count("--dataset")) cfg.dataset_path = f.dataset;
  if (cmd.count("--seed")) {
    cfg.split.seed = static_cast<std::uint64_t>(f.seed);
    cfg.hpo.seed = static_cast<std::uint64_t>(f.seed);
  }
  if (cmd.count("--top-k")) {
    cfg.feature_mode = "top_k";
    cfg.top_k = f.top_k;
  }
  if (cmd.count("--threads")) cfg.hpo.n_threads = f.threads;
  if (f.drop_leaky) cfg.drop_leaky = true;

  std::set<std::string> formats;
  std::stringstream ss(f.formats);
  for (std::string part; std::getline(ss, part, ',');)
    if (!part.empty()) formats.insert(part);

  std::string out_dir =
      f.out_dir.empty() ? std::string("runs/") + cfg.id : f.out_dir;

  auto report = bmt::run_experiment(cfg);
  std::printf("experiment %s: %zu train / %zu test, %zu features\n",
              report.config.id.c_str(), report.n_train, report.n_test,
              report.n_features);
  for (const auto& m : report.models) {
    std::printf("  %-4s acc=%.4f prec=%.4f rec=%.4f f1=%.4f auc=%.4f",
                bmt::algorithm_name(m.algo).c_str(), m.metrics.accuracy,
                m.metrics.precision, m.metrics.recall, m.metrics.f1,
                m.roc_auc);
    if (m.tuned)
      std::printf("  cv=%.4f search=%.2fs", m.cv_mean_accuracy,
                  m.search_seconds);
    std::printf("\n");
  }
  std::printf("total %.2fs\n", report.total_seconds);

  for (const auto& p : bmt::emit_report(report, formats, out_dir))
    std::printf("wrote %s\n", p.c_str());
  return 0;
}

int cmd_compare(const std::vector<std::string>& dirs,
                const std::string& out_json) {
  std::vector<bmt::experiment_report> reports;
  for (const auto& arg : dirs) {
    auto path = std::filesystem::path(arg);
    if (path.extension() != ".json") path /= "report.json";
    std::ifstream in(path);
    if (!in)
      throw std::runtime_error("cannot read report '" + path.string() + "'");
    reports.push_back(bmt::report_from_json(nlohmann::json::parse(in)));
  }
  auto table = bmt::compare_experiments(reports);
  bmt::print_comparison(table, std::cout);
  if (!out_json.empty()) {
    std::ofstream out(out_json, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + out_json + "'");
    out << bmt::comparison_to_json(table).dump(2) << '\n';
    std::printf("wrote %s\n", out_json.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survival classification toolkit for transplant outcome data"};
  app.require_subcommand(1);

  std::string ingest_path;
  auto* ingest = app.add_subcommand(
      "ingest", "load a table and print its numeric column summaries");
  ingest->add_option("path", ingest_path, "ARFF or CSV file")->required();

  std::string rank_path, rank_target = "survival_status", rank_positive = "1";
  std::string rank_out;
  std::size_t rank_top_k = 0;
  bool rank_drop_leaky = false;
  auto* rank = app.add_subcommand(
      "rank", "impute, encode, and rank features by chi-squared score");
  rank->add_option("path", rank_path, "ARFF or CSV file")->required();
  rank->add_option("--target", rank_target, "target column");
  rank->add_option("--positive", rank_positive, "positive class level");
  rank->add_option("--top-k", rank_top_k, "print only the k best");
  rank->add_flag("--drop-leaky", rank_drop_leaky,
                 "exclude outcome-derived columns");
  rank->add_option("--out", rank_out, "also write the full ranking as CSV");

  run_flags rf;
  auto* run = app.add_subcommand("run", "run an experiment and write reports");
  run->add_option("--experiment", rf.experiment,
                  "preset: A or B full features, C or D top-k; B and D tune");
  run->add_option("--config", rf.config_path,
                  "JSON config overlaid on the preset");
  run->add_option("--dataset", rf.dataset, "input table");
  run->add_option("--out", rf.out_dir, "output directory (default runs/<id>)");
  run->add_option("--seed", rf.seed, "split and search seed");
  run->add_option("--top-k", rf.top_k, "select the k best features");
  run->add_option("--threads", rf.threads,
                  "grid search worker threads, 0 = all cores");
  run->add_option("--formats", rf.formats, "comma list of json,csv,svg");
  run->add_flag("--drop-leaky", rf.drop_leaky,
                "exclude outcome-derived columns");

  std::vector<std::string> compare_dirs;
  std::string compare_out;
  auto* compare = app.add_subcommand(
      "compare", "summarize two or more finished runs side by side");
  compare->add_option("runs", compare_dirs,
                      "run directories or report.json files")
      ->expected(-2);
  compare->add_option("--out", compare_out, "also write the table as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(ingest_path);
    if (rank->parsed())
      return cmd_rank(rank_path, rank_target, rank_positive, rank_drop_leaky,
                      rank_top_k, rank_out);
    if (run->parsed()) return cmd_run(*run, rf);
    if (compare->parsed()) return cmd_compare(compare_dirs, compare_out);
  } catch (const std::exception& e) {
    std::cerr << "bmt: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
