#include "bmtkit/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bmtkit/rng.hpp"

namespace bmt {

namespace {

// quota with the largest-remainder rule; ties favor the larger class, then
// the lower class id, so results do not depend on map iteration order
std::vector<std::size_t> class_quotas(std::size_t want_total,
                                      const std::vector<std::size_t>& class_sizes,
                                      std::size_t n) {
  std::size_t k = class_sizes.size();
  std::vector<std::size_t> quota(k);
  std::vector<double> frac(k);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    double exact = static_cast<double>(want_total) *
                   static_cast<double>(class_sizes[c]) / static_cast<double>(n);
    quota[c] = static_cast<std::size_t>(exact);
    frac[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  std::vector<std::size_t> order(k);
  for (std::size_t c = 0; c < k; ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (frac[a] != frac[b]) return frac[a] > frac[b];
    if (class_sizes[a] != class_sizes[b]) return class_sizes[a] > class_sizes[b];
    return a < b;
  });
  for (std::size_t i = 0; assigned < want_total; ++i) {
    ++quota[order[i % k]];
    ++assigned;
  }
  return quota;
}

}  // namespace

std::vector<std::string> encoding_map::output_names() const {
  std::vector<std::string> names = numeric_passthrough;
  for (const auto& enc : encodings)
    for (const auto& lv : enc.kept_levels) names.push_back(enc.column + "_" + lv);
  return names;
}

std::size_t design_matrix::col_index(const std::string& name) const {
  for (std::size_t i = 0; i < column_names.size(); ++i)
    if (column_names[i] == name) return i;
  throw std::runtime_error("no matrix column named '" + name + "'");
}

impute_plan fit_imputer(const dataset& ds) {
  impute_plan plan;
  for (std::size_t c = 0; c < ds.n_cols(); ++c) {
    const auto& attr = ds.schema[c];
    if (attr.is_numeric()) {
      double sum = 0.0;
      std::size_t n = 0;
      for (double v : ds.columns[c].num) {
        if (std::isnan(v)) continue;
        sum += v;
        ++n;
      }
      if (n == 0)
        throw std::runtime_error("column '" + attr.name +
                                 "' is entirely missing, cannot impute");
      plan.numeric_fill[attr.name] = sum / static_cast<double>(n);
    } else {
      std::vector<std::size_t> counts(attr.levels.size(), 0);
      std::size_t n = 0;
      for (int v : ds.columns[c].cat) {
        if (v < 0) continue;
        ++counts[static_cast<std::size_t>(v)];
        ++n;
      }
      if (n == 0)
        throw std::runtime_error("column '" + attr.name +
                                 "' is entirely missing, cannot impute");
      std::size_t best = attr.levels.size();
      for (std::size_t i = 0; i < attr.levels.size(); ++i) {
        if (counts[i] == 0) continue;
        if (best == attr.levels.size() || counts[i] > counts[best] ||
            (counts[i] == counts[best] && attr.levels[i] < attr.levels[best]))
          best = i;
      }
      plan.categorical_fill[attr.name] = attr.levels[best];
    }
  }
  return plan;
}

dataset apply_imputer(const dataset& ds, const impute_plan& plan) {
  dataset out = ds;
  for (std::size_t c = 0; c < out.n_cols(); ++c) {
    const auto& attr = out.schema[c];
    if (attr.is_numeric()) {
      auto& vals = out.columns[c].num;
      bool any = std::any_of(vals.begin(), vals.end(),
                             [](double v) { return std::isnan(v); });
      if (!any) continue;
      auto it = plan.numeric_fill.find(attr.name);
      if (it == plan.numeric_fill.end())
        throw std::runtime_error("column '" + attr.name +
                                 "' has missing cells but no fill in the plan");
      for (double& v : vals)
        if (std::isnan(v)) v = it->second;
    } else {
      auto& vals = out.columns[c].cat;
      bool any = std::any_of(vals.begin(), vals.end(), [](int v) { return v < 0; });
      if (!any) continue;
      auto it = plan.categorical_fill.find(attr.name);
      if (it == plan.categorical_fill.end())
        throw std::runtime_error("column '" + attr.name +
                                 "' has missing cells but no fill in the plan");
      auto lv = std::find(attr.levels.begin(), attr.levels.end(), it->second);
      if (lv == attr.levels.end())
        throw std::runtime_error("fill level '" + it->second +
                                 "' not declared for column '" + attr.name + "'");
      int idx = static_cast<int>(lv - attr.levels.begin());
      for (int& v : vals)
        if (v < 0) v = idx;
    }
  }
  return out;
}

encoding_map fit_encoding(const dataset& ds) {
  encoding_map map;
  for (std::size_t c = 0; c < ds.n_cols(); ++c) {
    const auto& attr = ds.schema[c];
    if (attr.name == ds.target_column) continue;
    if (attr.is_numeric()) {
      map.numeric_passthrough.push_back(attr.name);
      continue;
    }
    for (std::size_t r = 0; r < ds.n_rows; ++r)
      if (ds.is_missing(r, c))
        throw std::runtime_error("column '" + attr.name +
                                 "' still has missing cells; impute first");
    encoding_map::column_encoding enc;
    enc.column = attr.name;
    std::vector<std::string> levels = attr.levels;
    std::sort(levels.begin(), levels.end());
    if (levels.size() < 2) {
      map.warnings.push_back("column '" + attr.name +
                             "' has a single level and encodes to nothing");
      enc.baseline = levels.empty() ? "" : levels[0];
    } else {
      enc.baseline = levels[0];
      enc.kept_levels.assign(levels.begin() + 1, levels.end());
    }
    map.encodings.push_back(std::move(enc));
  }
  return map;
}

design_matrix apply_encoding(const dataset& ds, const encoding_map& map,
                             const std::string& target,
                             const std::string& positive_level) {
  design_matrix m;
  m.column_names = map.output_names();
  m.n_rows = ds.n_rows;
  m.n_cols = m.column_names.size();
  m.values.assign(m.n_rows * m.n_cols, 0.0);
  m.positive_level = positive_level;

  std::size_t out_col = 0;
  for (const auto& name : map.numeric_passthrough) {
    std::size_t c = ds.col_index(name);
    if (!ds.schema[c].is_numeric())
      throw std::runtime_error("column '" + name + "' is not numeric");
    for (std::size_t r = 0; r < m.n_rows; ++r) m.at(r, out_col) = ds.columns[c].num[r];
    ++out_col;
  }
  for (const auto& enc : map.encodings) {
    std::size_t c = ds.col_index(enc.column);
    const auto& attr = ds.schema[c];
    bool warned = false;
    for (std::size_t r = 0; r < m.n_rows; ++r) {
      if (ds.is_missing(r, c))
        throw std::runtime_error("column '" + enc.column +
                                 "' still has missing cells; impute first");
      const std::string& level = attr.levels[ds.columns[c].cat[r]];
      bool hit = false;
      for (std::size_t k = 0; k < enc.kept_levels.size(); ++k) {
        if (enc.kept_levels[k] == level) {
          m.at(r, out_col + k) = 1.0;
          hit = true;
          break;
        }
      }
      if (!hit && level != enc.baseline && !warned) {
        m.warnings.push_back("column '" + enc.column + "': level '" + level +
                             "' unseen at fit time, encoded as all zeros");
        warned = true;
      }
    }
    out_col += enc.kept_levels.size();
  }

  std::size_t tc = ds.col_index(target);
  if (ds.schema[tc].is_numeric())
    throw std::runtime_error("target column '" + target + "' must be categorical");
  // a map fitted without the target set would leak the label straight into
  // the features; refuse rather than hand back a perfect classifier
  for (const auto& name : map.numeric_passthrough)
    if (name == target)
      throw std::runtime_error("target column '" + target +
                               "' is part of the feature encoding; set the "
                               "target before fitting");
  for (const auto& enc : map.encodings)
    if (enc.column == target)
      throw std::runtime_error("target column '" + target +
                               "' is part of the feature encoding; set the "
                               "target before fitting");
  m.labels.resize(m.n_rows);
  for (std::size_t r = 0; r < m.n_rows; ++r) {
    if (ds.is_missing(r, tc))
      throw std::runtime_error("target column has a missing cell at row " +
                               std::to_string(r));
    m.labels[r] = ds.category_at(r, tc) == positive_level ? 1 : 0;
  }
  return m;
}

scaler_params fit_scaler(const design_matrix& m, const std::vector<std::string>& columns) {
  scaler_params p;
  p.columns = columns.empty() ? m.column_names : columns;
  if (m.n_rows == 0) throw std::runtime_error("cannot fit a scaler on an empty matrix");
  for (const auto& name : p.columns) {
    std::size_t c = m.col_index(name);
    double sum = 0.0;
    for (std::size_t r = 0; r < m.n_rows; ++r) sum += m.at(r, c);
    double mean = sum / static_cast<double>(m.n_rows);
    double ss = 0.0;
    for (std::size_t r = 0; r < m.n_rows; ++r) {
      double d = m.at(r, c) - mean;
      ss += d * d;
    }
    double sd = std::sqrt(ss / static_cast<double>(m.n_rows));
    p.center.push_back(mean);
    p.scale.push_back(sd > 0.0 ? sd : 1.0);
  }
  return p;
}

design_matrix apply_scaler(const design_matrix& m, const scaler_params& params) {
  design_matrix out = m;
  for (std::size_t i = 0; i < params.columns.size(); ++i) {
    std::size_t c = out.col_index(params.columns[i]);
    for (std::size_t r = 0; r < out.n_rows; ++r)
      out.at(r, c) = (out.at(r, c) - params.center[i]) / params.scale[i];
  }
  return out;
}

design_matrix take_rows(const design_matrix& m, const std::vector<std::size_t>& rows) {
  design_matrix out;
  out.n_rows = rows.size();
  out.n_cols = m.n_cols;
  out.column_names = m.column_names;
  out.positive_level = m.positive_level;
  out.values.reserve(rows.size() * m.n_cols);
  for (std::size_t r : rows)
    out.values.insert(out.values.end(), m.row(r), m.row(r) + m.n_cols);
  if (!m.labels.empty()) {
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.labels.push_back(m.labels[r]);
  }
  return out;
}

design_matrix take_columns(const design_matrix& m, const std::vector<std::size_t>& cols) {
  design_matrix out;
  out.n_rows = m.n_rows;
  out.n_cols = cols.size();
  out.labels = m.labels;
  out.positive_level = m.positive_level;
  for (std::size_t c : cols) out.column_names.push_back(m.column_names[c]);
  out.values.reserve(m.n_rows * cols.size());
  for (std::size_t r = 0; r < m.n_rows; ++r)
    for (std::size_t c : cols) out.values.push_back(m.at(r, c));
  return out;
}

split_indices train_test_split(std::size_t n_rows, double ratio, std::uint64_t seed,
                               const std::vector<int>& labels) {
  if (ratio <= 0.0 || ratio >= 1.0)
    throw std::runtime_error("split ratio must be inside (0, 1)");
  if (labels.size() != n_rows)
    throw std::runtime_error("labels length does not match row count");

  std::vector<std::vector<std::size_t>> by_class(2);
  for (std::size_t r = 0; r < n_rows; ++r) {
    int y = labels[r];
    if (y != 0 && y != 1) throw std::runtime_error("labels must be 0 or 1");
    by_class[static_cast<std::size_t>(y)].push_back(r);
  }
  if (by_class[0].empty() || by_class[1].empty())
    throw std::runtime_error("both classes must be present to stratify");

  std::size_t test_n =
      static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n_rows)));
  std::vector<std::size_t> sizes = {by_class[0].size(), by_class[1].size()};
  auto quota = class_quotas(test_n, sizes, n_rows);

  split_indices out;
  out.seed = seed;
  rng gen = rng(seed).fork("train_test_split");
  for (std::size_t c = 0; c < 2; ++c) {
    auto rows = by_class[c];
    gen.shuffle(rows);
    for (std::size_t i = 0; i < rows.size(); ++i)
      (i < quota[c] ? out.test_rows : out.train_rows).push_back(rows[i]);
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  return out;
}

}  // namespace bmt
