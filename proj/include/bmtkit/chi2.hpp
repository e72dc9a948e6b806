#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bmtkit/preprocess.hpp"

namespace bmt {

struct ranking_entry {
  std::string column;
  double score = 0.0;
  std::size_t original_index = 0;
};

struct feature_ranking {
  std::vector<ranking_entry> entries;  // score descending, ties by index
  std::string method = "frequency_sum";
};

// Frequency-sum chi-squared: feature values are summed per class as the
// observed frequencies.  O_c = sum of the column over rows of class c,
// E_c = column_total * n_c / n, score = sum_c (O_c - E_c)^2 / E_c.
// Columns whose total is zero score zero.  Requires a non-negative matrix,
// which is why ranking always runs on the unscaled encoded matrix.
std::vector<double> chi2_frequency_sum(const design_matrix& m);

// Classic Pearson statistic on an r x c count table; the oracle for binary
// dummy columns.
double chi2_contingency(const std::vector<std::vector<double>>& table);

feature_ranking rank_features(const std::vector<double>& scores,
                              const std::vector<std::string>& names);

feature_ranking rank_features(const design_matrix& m);

// Reduced matrix holding the k top-ranked columns in ranking order.
design_matrix select_top_k(const design_matrix& m, const feature_ranking& ranking,
                           std::size_t k);

// Table layout: rank, attribute, original_index, score.
void write_ranking_csv(const feature_ranking& ranking, std::ostream& out);

}  // namespace bmt
