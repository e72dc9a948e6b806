#include "bmtkit/chi2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bmt {

std::vector<double> chi2_frequency_sum(const design_matrix& m) {
  if (m.labels.size() != m.n_rows)
    throw std::runtime_error("matrix carries no labels to score against");
  std::size_t n_pos = 0;
  for (int y : m.labels) {
    if (y != 0 && y != 1) throw std::runtime_error("labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(y);
  }
  if (n_pos == 0 || n_pos == m.n_rows)
    throw std::runtime_error("chi-squared scoring needs both classes present");

  double n = static_cast<double>(m.n_rows);
  double frac[2] = {static_cast<double>(m.n_rows - n_pos) / n,
                    static_cast<double>(n_pos) / n};

  std::vector<double> scores(m.n_cols, 0.0);
  for (std::size_t c = 0; c < m.n_cols; ++c) {
    double obs[2] = {0.0, 0.0};
    for (std::size_t r = 0; r < m.n_rows; ++r) {
      double v = m.at(r, c);
      if (v < 0.0)
        throw std::runtime_error("column '" + m.column_names[c] +
                                 "' has negative entries; score unscaled data");
      obs[m.labels[r]] += v;
    }
    double total = obs[0] + obs[1];
    if (total == 0.0) continue;
    double score = 0.0;
    for (int k = 0; k < 2; ++k) {
      double expected = total * frac[k];
      double d = obs[k] - expected;
      score += d * d / expected;
    }
    scores[c] = score;
  }
  return scores;
}

double chi2_contingency(const std::vector<std::vector<double>>& table) {
  if (table.empty() || table[0].empty())
    throw std::runtime_error("empty contingency table");
  std::size_t n_cols = table[0].size();
  std::vector<double> row_sum(table.size(), 0.0), col_sum(n_cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].size() != n_cols)
      throw std::runtime_error("ragged contingency table");
    for (std::size_t j = 0; j < n_cols; ++j) {
      double v = table[i][j];
      if (v < 0.0) throw std::runtime_error("negative count in contingency table");
      row_sum[i] += v;
      col_sum[j] += v;
      total += v;
    }
  }
  for (double s : row_sum)
    if (s == 0.0) throw std::runtime_error("contingency table has an empty row");
  for (double s : col_sum)
    if (s == 0.0) throw std::runtime_error("contingency table has an empty column");

  double stat = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < n_cols; ++j) {
      double expected = row_sum[i] * col_sum[j] / total;
      double d = table[i][j] - expected;
      stat += d * d / expected;
    }
  return stat;
}

feature_ranking rank_features(const std::vector<double>& scores,
                              const std::vector<std::string>& names) {
  if (scores.size() != names.size())
    throw std::runtime_error("one score per column required");
  feature_ranking rk;
  rk.entries.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    rk.entries[i] = {names[i], scores[i], i};
  std::stable_sort(rk.entries.begin(), rk.entries.end(),
                   [](const ranking_entry& a, const ranking_entry& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.original_index < b.original_index;
                   });
  return rk;
}

feature_ranking rank_features(const design_matrix& m) {
  return rank_features(chi2_frequency_sum(m), m.column_names);
}

design_matrix select_top_k(const design_matrix& m, const feature_ranking& ranking,
                           std::size_t k) {
  if (k < 1 || k > ranking.entries.size())
    throw std::runtime_error("top-k selection out of range: k=" + std::to_string(k));
  std::vector<std::size_t> cols;
  cols.reserve(k);
  for (std::size_t i = 0; i < k; ++i) cols.push_back(ranking.entries[i].original_index);
  return take_columns(m, cols);
}

void write_ranking_csv(const feature_ranking& ranking, std::ostream& out) {
  out << "rank,attribute,original_index,score\n";
  char buf[64];
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const auto& e = ranking.entries[i];
    std::snprintf(buf, sizeof(buf), "%.4f", e.score);
    out << (i + 1) << "," << e.column << "," << e.original_index << "," << buf << "\n";
  }
}

}  // namespace bmt
