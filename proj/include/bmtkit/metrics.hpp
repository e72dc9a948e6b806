#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace bmt {

// 2x2 cross-tabulation, class 1 positive
struct confusion_matrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
};

confusion_matrix confusion_from_labels(const std::vector<int>& y_true,
                                       const std::vector<int>& y_pred);

// Scalar metrics from a confusion matrix. A zero denominator yields 0 for
// that metric and records its name in `degenerate` instead of throwing, so
// a batch of experiments never aborts on one pathological fold.
struct metrics_report {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  confusion_matrix confusion;
  std::vector<std::string> degenerate;
};

metrics_report metrics_from_confusion(const confusion_matrix& cm);

// Threshold sweep over distinct score values, descending; tied scores move
// as one block, so ties across classes show up as diagonal segments. The
// curve always starts at (0,0) and ends at (1,1); the arrays are parallel
// and thresholds[0] is +infinity (nothing predicted positive).
struct roc_curve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  std::vector<double> thresholds;

  std::size_t size() const { return fpr.size(); }
};

roc_curve roc_from_scores(const std::vector<int>& y_true,
                          const std::vector<double>& scores);

double auc_trapezoid(const roc_curve& curve);

// Probability that a random positive outscores a random negative, ties
// counted 1/2, exhaustive over all pairs. Kept as the independent oracle
// for auc_trapezoid.
double auc_pair_count(const std::vector<int>& y_true,
                      const std::vector<double>& scores);

nlohmann::ordered_json to_json(const metrics_report& report);
nlohmann::ordered_json to_json(const roc_curve& curve);

// header "fpr,tpr,threshold", one row per curve point
void write_roc_csv(std::ostream& out, const roc_curve& curve);

}  // namespace bmt
