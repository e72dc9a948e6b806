#include <bmtkit/tree.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bmt {

double tree_value(const tree& t, const double* row) {
  if (t.empty()) throw std::logic_error("tree_value: empty tree");
  std::size_t i = 0;
  while (!t[i].is_leaf()) {
    const tree_node& n = t[i];
    i = static_cast<std::size_t>(row[n.feature] <= n.threshold ? n.left : n.right);
  }
  return t[i].value;
}

double gini_impurity(double p) { return 2.0 * p * (1.0 - p); }

double entropy_impurity(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

namespace {

// sort key (value, row index) so equal values keep a fixed order and float
// accumulation is reproducible no matter what the sort does internally
using sort_entry = std::pair<double, std::uint32_t>;

void gather_sorted(data_view X, const std::vector<std::uint32_t>& rows,
                   std::uint32_t feature, std::vector<sort_entry>& out) {
  out.clear();
  out.reserve(rows.size());
  for (std::uint32_t r : rows) out.emplace_back(X.at(r, feature), r);
  std::sort(out.begin(), out.end());
}

struct class_builder {
  data_view X;
  const std::vector<int>& y;
  const std::vector<double>* w;
  const class_tree_params& p;
  tree nodes;
  std::vector<sort_entry> sorted;
  std::vector<std::uint32_t> feat_pool;

  double impurity(double pos_frac) const {
    return p.use_entropy ? entropy_impurity(pos_frac) : gini_impurity(pos_frac);
  }

  double row_weight(std::uint32_t r) const { return w ? (*w)[r] : 1.0; }

  std::vector<std::uint32_t> pick_features() {
    const std::size_t d = X.n_cols;
    if (p.max_features == 0 || p.max_features >= d) {
      std::vector<std::uint32_t> all(d);
      std::iota(all.begin(), all.end(), 0u);
      return all;
    }
    if (feat_pool.size() != d) {
      feat_pool.resize(d);
      std::iota(feat_pool.begin(), feat_pool.end(), 0u);
    }
    for (std::size_t i = 0; i < p.max_features; ++i) {
      std::size_t j = i + p.gen->below(d - i);
      std::swap(feat_pool[i], feat_pool[j]);
    }
    std::vector<std::uint32_t> taken(feat_pool.begin(),
                                     feat_pool.begin() + p.max_features);
    std::sort(taken.begin(), taken.end());
    return taken;
  }

  int build(const std::vector<std::uint32_t>& rows, std::size_t depth) {
    double wsum = 0.0, wpos = 0.0;
    std::size_t npos = 0;
    for (std::uint32_t r : rows) {
      double wr = row_weight(r);
      wsum += wr;
      if (y[r] == 1) {
        wpos += wr;
        ++npos;
      }
    }
    const int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[idx].value = wsum > 0.0 ? wpos / wsum : 0.5;

    bool stop = npos == 0 || npos == rows.size() ||
                (p.max_depth > 0 && depth >= p.max_depth) ||
                rows.size() < p.min_samples_split;
    int best_f = -1;
    double best_thr = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    if (!stop) {
      const std::size_t m = rows.size();
      for (std::uint32_t f : pick_features()) {
        gather_sorted(X, rows, f, sorted);
        if (sorted.front().first == sorted.back().first) continue;
        double wl = 0.0, wlpos = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
          const auto& [v, r] = sorted[i];
          double wr = row_weight(r);
          wl += wr;
          if (y[r] == 1) wlpos += wr;
          if (v == sorted[i + 1].first) continue;
          const std::size_t cl = i + 1, cr = m - cl;
          if (cl < p.min_samples_leaf || cr < p.min_samples_leaf) continue;
          double wrt = wsum - wl, wrpos = wpos - wlpos;
          double score = (wl > 0.0 ? wl * impurity(wlpos / wl) : 0.0) +
                         (wrt > 0.0 ? wrt * impurity(wrpos / wrt) : 0.0);
          if (score < best_score) {
            best_score = score;
            best_f = static_cast<int>(f);
            best_thr = (v + sorted[i + 1].first) / 2.0;
          }
        }
      }
    }
    if (best_f < 0) return idx;  // leaf: pure, rule-stopped, or nothing to split on

    std::vector<std::uint32_t> left, right;
    for (std::uint32_t r : rows)
      (X.at(r, static_cast<std::uint32_t>(best_f)) <= best_thr ? left : right)
          .push_back(r);
    const int li = build(left, depth + 1);
    const int ri = build(right, depth + 1);
    nodes[idx].feature = best_f;
    nodes[idx].threshold = best_thr;
    nodes[idx].left = li;
    nodes[idx].right = ri;
    return idx;
  }
};

}  // namespace

tree fit_class_tree(data_view X, const std::vector<int>& y,
                    const std::vector<std::uint32_t>& rows,
                    const std::vector<double>* weights,
                    const class_tree_params& p) {
  if (rows.empty()) throw std::invalid_argument("tree: no rows to fit");
  if (X.n_cols == 0) throw std::invalid_argument("tree: zero-width matrix");
  if (p.max_features > 0 && p.max_features < X.n_cols && p.gen == nullptr)
    throw std::logic_error("tree: feature subsetting needs a generator");
  class_builder b{X, y, weights, p, {}, {}, {}};
  b.build(rows, 0);
  return std::move(b.nodes);
}

namespace {

struct reg_builder {
  data_view X;
  const std::vector<double>& t;
  const reg_tree_params& p;
  const std::function<double(const std::vector<std::uint32_t>&)>& leaf_value;
  tree nodes;
  std::vector<sort_entry> sorted;

  int build(const std::vector<std::uint32_t>& rows, std::size_t depth) {
    const int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[idx].value = leaf_value(rows);

    const std::size_t m = rows.size();
    if ((p.max_depth > 0 && depth >= p.max_depth) || m < 2) return idx;

    // a constant target is the regression analog of a pure node: every
    // split would leave both children at the same value
    bool constant = true;
    double total = 0.0;
    for (std::uint32_t r : rows) {
      total += t[r];
      constant = constant && t[r] == t[rows.front()];
    }
    if (constant) return idx;

    int best_f = -1;
    double best_thr = 0.0;
    // sum-of-squares-of-sums proxy: maximizing it minimizes child variance
    double best_obj = -std::numeric_limits<double>::infinity();
    for (std::uint32_t f = 0; f < X.n_cols; ++f) {
      gather_sorted(X, rows, f, sorted);
      if (sorted.front().first == sorted.back().first) continue;
      double sl = 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        sl += t[sorted[i].second];
        if (sorted[i].first == sorted[i + 1].first) continue;
        const std::size_t cl = i + 1, cr = m - cl;
        if (cl < p.min_samples_leaf || cr < p.min_samples_leaf) continue;
        double sr = total - sl;
        double obj = sl * sl / static_cast<double>(cl) +
                     sr * sr / static_cast<double>(cr);
        if (obj > best_obj) {
          best_obj = obj;
          best_f = static_cast<int>(f);
          best_thr = (sorted[i].first + sorted[i + 1].first) / 2.0;
        }
      }
    }
    if (best_f < 0) return idx;

    std::vector<std::uint32_t> left, right;
    for (std::uint32_t r : rows)
      (X.at(r, static_cast<std::uint32_t>(best_f)) <= best_thr ? left : right)
          .push_back(r);
    const int li = build(left, depth + 1);
    const int ri = build(right, depth + 1);
    nodes[idx].feature = best_f;
    nodes[idx].threshold = best_thr;
    nodes[idx].left = li;
    nodes[idx].right = ri;
    return idx;
  }
};

struct xgb_builder {
  data_view X;
  const std::vector<double>& g;
  const std::vector<double>& h;
  const std::vector<std::uint32_t>& features;
  const xgb_tree_params& p;
  tree nodes;
  std::vector<sort_entry> sorted;

  int build(const std::vector<std::uint32_t>& rows, std::size_t depth) {
    double G = 0.0, H = 0.0;
    for (std::uint32_t r : rows) {
      G += g[r];
      H += h[r];
    }
    const int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    // with lambda = 0 a fully saturated node can have H = 0; its gradient
    // sum is then 0 too, so the weight is 0 rather than 0/0
    nodes[idx].value = H + p.lambda > 0.0 ? -G / (H + p.lambda) : 0.0;

    if (p.max_depth > 0 && depth >= p.max_depth) return idx;
    const std::size_t m = rows.size();
    if (m < 2) return idx;

    int best_f = -1;
    double best_thr = 0.0;
    double best_gain = 0.0;  // a split must strictly beat staying a leaf
    const double parent_term =
        H + p.lambda > 0.0 ? G * G / (H + p.lambda) : 0.0;
    for (std::uint32_t f : features) {
      gather_sorted(X, rows, f, sorted);
      if (sorted.front().first == sorted.back().first) continue;
      double GL = 0.0, HL = 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        const std::uint32_t r = sorted[i].second;
        GL += g[r];
        HL += h[r];
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double HR = H - HL, GR = G - GL;
        if (HL < p.min_child_weight || HR < p.min_child_weight) continue;
        if (HL + p.lambda <= 0.0 || HR + p.lambda <= 0.0) continue;
        double gain = 0.5 * (GL * GL / (HL + p.lambda) +
                             GR * GR / (HR + p.lambda) - parent_term) -
                      p.gamma;
        if (gain > best_gain) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_thr = (sorted[i].first + sorted[i + 1].first) / 2.0;
        }
      }
    }
    if (best_f < 0) return idx;

    std::vector<std::uint32_t> left, right;
    for (std::uint32_t r : rows)
      (X.at(r, static_cast<std::uint32_t>(best_f)) <= best_thr ? left : right)
          .push_back(r);
    const int li = build(left, depth + 1);
    const int ri = build(right, depth + 1);
    nodes[idx].feature = best_f;
    nodes[idx].threshold = best_thr;
    nodes[idx].left = li;
    nodes[idx].right = ri;
    return idx;
  }
};

}  // namespace

tree fit_reg_tree(data_view X, const std::vector<double>& target,
                  const std::vector<std::uint32_t>& rows,
                  const reg_tree_params& p,
                  const std::function<double(const std::vector<std::uint32_t>&)>&
                      leaf_value) {
  if (rows.empty()) throw std::invalid_argument("tree: no rows to fit");
  if (X.n_cols == 0) throw std::invalid_argument("tree: zero-width matrix");
  reg_builder b{X, target, p, leaf_value, {}, {}};
  b.build(rows, 0);
  return std::move(b.nodes);
}

tree fit_xgb_tree(data_view X, const std::vector<double>& g,
                  const std::vector<double>& h,
                  const std::vector<std::uint32_t>& rows,
                  const std::vector<std::uint32_t>& features,
                  const xgb_tree_params& p) {
  if (rows.empty()) throw std::invalid_argument("tree: no rows to fit");
  if (X.n_cols == 0 || features.empty())
    throw std::invalid_argument("tree: no features to split on");
  xgb_builder b{X, g, h, features, p, {}, {}};
  b.build(rows, 0);
  return std::move(b.nodes);
}

}  // namespace bmt
