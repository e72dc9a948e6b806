#include <bmtkit/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <bmtkit/dataset.hpp>

namespace bmt {

namespace {

void require_binary(const std::vector<int>& v, const char* what) {
  for (int x : v)
    if (x != 0 && x != 1)
      throw std::invalid_argument(std::string(what) + " must contain only 0/1");
}

double ratio_or_flag(double num, double den, const char* name,
                     std::vector<std::string>& degenerate) {
  if (den == 0.0) {
    degenerate.push_back(name);
    return 0.0;
  }
  return num / den;
}

}  // namespace

confusion_matrix confusion_from_labels(const std::vector<int>& y_true,
                                       const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("confusion: y_true and y_pred differ in length");
  if (y_true.empty())
    throw std::invalid_argument("confusion: empty label vectors");
  require_binary(y_true, "y_true");
  require_binary(y_pred, "y_pred");
  confusion_matrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_pred[i] == 1)
      ++(y_true[i] == 1 ? cm.tp : cm.fp);
    else
      ++(y_true[i] == 1 ? cm.fn : cm.tn);
  }
  return cm;
}

metrics_report metrics_from_confusion(const confusion_matrix& cm) {
  if (cm.total() == 0)
    throw std::invalid_argument("metrics: confusion matrix has no counts");
  const double tp = static_cast<double>(cm.tp);
  const double tn = static_cast<double>(cm.tn);
  const double fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn);
  metrics_report r;
  r.confusion = cm;
  r.accuracy = (tp + tn) / static_cast<double>(cm.total());
  r.precision = ratio_or_flag(tp, tp + fp, "precision", r.degenerate);
  r.recall = ratio_or_flag(tp, tp + fn, "recall", r.degenerate);
  r.specificity = ratio_or_flag(tn, tn + fp, "specificity", r.degenerate);
  r.f1 = ratio_or_flag(2.0 * r.precision * r.recall, r.precision + r.recall,
                       "f1", r.degenerate);
  return r;
}

roc_curve roc_from_scores(const std::vector<int>& y_true,
                          const std::vector<double>& scores) {
  if (y_true.size() != scores.size())
    throw std::invalid_argument("roc: y_true and scores differ in length");
  if (y_true.empty()) throw std::invalid_argument("roc: empty input");
  require_binary(y_true, "y_true");
  const std::size_t n = y_true.size();
  std::size_t n_pos = 0;
  for (int y : y_true) n_pos += static_cast<std::size_t>(y);
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("roc: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  roc_curve curve;
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());

  std::size_t tp = 0, fp = 0, i = 0;
  while (i < n) {
    const double s = scores[order[i]];
    // consume the whole tie block before emitting a point
    while (i < n && scores[order[i]] == s) {
      if (y_true[order[i]] == 1)
        ++tp;
      else
        ++fp;
      ++i;
    }
    curve.fpr.push_back(static_cast<double>(fp) / static_cast<double>(n_neg));
    curve.tpr.push_back(static_cast<double>(tp) / static_cast<double>(n_pos));
    curve.thresholds.push_back(s);
  }
  // the lowest threshold predicts everything positive, so the sweep already
  // landed on (1,1); guard anyway
  if (curve.fpr.back() != 1.0 || curve.tpr.back() != 1.0) {
    curve.fpr.push_back(1.0);
    curve.tpr.push_back(1.0);
    curve.thresholds.push_back(-std::numeric_limits<double>::infinity());
  }
  return curve;
}

double auc_trapezoid(const roc_curve& curve) {
  if (curve.size() < 2) throw std::invalid_argument("auc: curve has no area");
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve.fpr[i] - curve.fpr[i - 1]) *
            (curve.tpr[i] + curve.tpr[i - 1]) * 0.5;
  return area;
}

double auc_pair_count(const std::vector<int>& y_true,
                      const std::vector<double>& scores) {
  if (y_true.size() != scores.size())
    throw std::invalid_argument("auc: y_true and scores differ in length");
  require_binary(y_true, "y_true");
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] != 1) continue;
    for (std::size_t j = 0; j < y_true.size(); ++j) {
      if (y_true[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  }
  if (pairs == 0)
    throw std::invalid_argument("auc: both classes must be present");
  return wins / static_cast<double>(pairs);
}

nlohmann::ordered_json to_json(const metrics_report& report) {
  nlohmann::ordered_json j;
  j["accuracy"] = report.accuracy;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["specificity"] = report.specificity;
  j["f1"] = report.f1;
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"tn", report.confusion.tn},
                    {"fp", report.confusion.fp},
                    {"fn", report.confusion.fn}};
  j["degenerate"] = report.degenerate;
  return j;
}

nlohmann::ordered_json to_json(const roc_curve& curve) {
  nlohmann::ordered_json j;
  j["fpr"] = curve.fpr;
  j["tpr"] = curve.tpr;
  j["thresholds"] = curve.thresholds;
  return j;
}

void write_roc_csv(std::ostream& out, const roc_curve& curve) {
  out << "fpr,tpr,threshold\n";
  for (std::size_t i = 0; i < curve.size(); ++i)
    out << format_number(curve.fpr[i]) << ',' << format_number(curve.tpr[i])
        << ',' << format_number(curve.thresholds[i]) << '\n';
}

}  // namespace bmt
