#include "bmtkit/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "bmtkit/rng.hpp"  // fnv1a64

namespace bmt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '\'' && s.back() == '\'') ||
                        (s.front() == '"' && s.back() == '"')))
    return s.substr(1, s.size() - 2);
  return s;
}

// comma split honoring simple quoting; no escape sequences
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char c : line) {
    if (quote) {
      if (c == quote) quote = 0;
      cur.push_back(c);
    } else if (c == '\'' || c == '"') {
      quote = c;
      cur.push_back(c);
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_number(const std::string& tok, double& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool is_missing_token(const std::string& tok) { return tok.empty() || tok == "?"; }

}  // namespace

std::string format_number(double v) {
  std::array<char, 32> buf;
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), p);
}

namespace {

attr_kind nominal_kind(const std::vector<std::string>& levels) {
  return levels.size() == 2 ? attr_kind::boolean : attr_kind::categorical;
}

// appends undeclared levels rather than rejecting the row; scraped clinical
// files tend to drift from their headers
int level_index_or_extend(dataset& ds, std::size_t col, const std::string& value,
                          std::size_t line_no) {
  auto& levels = ds.schema[col].levels;
  auto it = std::find(levels.begin(), levels.end(), value);
  if (it != levels.end()) return static_cast<int>(it - levels.begin());
  levels.push_back(value);
  ds.warnings.push_back(ds.source + ":" + std::to_string(line_no) + ": column '" +
                        ds.schema[col].name + "': undeclared level '" + value +
                        "' appended");
  return static_cast<int>(levels.size() - 1);
}

void append_cell(dataset& ds, std::size_t col, const std::string& tok,
                 std::size_t line_no) {
  auto& data = ds.columns[col];
  if (ds.schema[col].is_numeric()) {
    if (is_missing_token(tok)) {
      data.num.push_back(kNaN);
      return;
    }
    double v;
    if (!parse_number(tok, v))
      throw parse_error(ds.source, line_no,
                        "column '" + ds.schema[col].name + "': cannot parse '" +
                            tok + "' as a number");
    data.num.push_back(v);
  } else {
    if (is_missing_token(tok)) {
      data.cat.push_back(-1);
      return;
    }
    data.cat.push_back(level_index_or_extend(ds, col, unquote(tok), line_no));
  }
}

std::uint64_t file_checksum(const std::string& path, std::string& bytes_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  bytes_out = ss.str();
  return fnv1a64(bytes_out.data(), bytes_out.size());
}

}  // namespace

parse_error::parse_error(std::string source_, std::size_t line_,
                         const std::string& message)
    : std::runtime_error(source_ + ":" + std::to_string(line_) + ": " + message),
      source(std::move(source_)),
      line(line_) {}

std::size_t dataset::col_index(const std::string& name) const {
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (schema[i].name == name) return i;
  throw std::runtime_error("no column named '" + name + "'");
}

bool dataset::has_column(const std::string& name) const {
  for (const auto& a : schema)
    if (a.name == name) return true;
  return false;
}

bool dataset::is_missing(std::size_t row, std::size_t col) const {
  if (schema[col].is_numeric()) return std::isnan(columns[col].num[row]);
  return columns[col].cat[row] < 0;
}

const std::string& dataset::category_at(std::size_t row, std::size_t col) const {
  if (schema[col].is_numeric())
    throw std::runtime_error("column '" + schema[col].name + "' is numeric");
  int idx = columns[col].cat[row];
  if (idx < 0) throw std::runtime_error("missing cell has no category");
  return schema[col].levels[static_cast<std::size_t>(idx)];
}

void dataset::set_target(const std::string& name) {
  std::size_t col = col_index(name);
  if (schema[col].is_numeric())
    throw std::runtime_error("target column '" + name + "' must be categorical");
  std::set<int> observed;
  for (int v : columns[col].cat)
    if (v >= 0) observed.insert(v);
  if (observed.size() != 2)
    throw std::runtime_error("target column '" + name + "' has " +
                             std::to_string(observed.size()) +
                             " observed levels, need exactly 2");
  target_column = name;
}

dataset parse_arff(std::istream& in, const std::string& source_name) {
  dataset ds;
  ds.source = source_name;
  std::string line;
  std::size_t line_no = 0;
  bool in_data = false;

  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;

    if (!in_data) {
      std::string low = lower(t);
      if (low.rfind("@relation", 0) == 0) {
        ds.relation = unquote(trim(t.substr(9)));
      } else if (low.rfind("@attribute", 0) == 0) {
        std::string rest = trim(t.substr(10));
        // name may be quoted; type is everything after it
        std::size_t name_end;
        if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
          name_end = rest.find(rest[0], 1);
          if (name_end == std::string::npos)
            throw parse_error(source_name, line_no, "unterminated attribute name");
          ++name_end;
        } else {
          name_end = rest.find_first_of(" \t");
        }
        if (name_end == std::string::npos)
          throw parse_error(source_name, line_no, "attribute declaration without a type");
        attribute_schema attr;
        attr.name = unquote(trim(rest.substr(0, name_end)));
        std::string type = trim(rest.substr(name_end));
        if (!type.empty() && type[0] == '{') {
          if (type.back() != '}')
            throw parse_error(source_name, line_no, "unterminated level list");
          for (auto& lv : split_fields(type.substr(1, type.size() - 2)))
            attr.levels.push_back(unquote(lv));
          attr.kind = nominal_kind(attr.levels);
        } else {
          std::string tl = lower(type);
          if (tl == "numeric" || tl == "real" || tl == "integer") {
            attr.kind = attr_kind::numeric;
          } else {
            throw parse_error(source_name, line_no,
                              "unsupported attribute type '" + type + "'");
          }
        }
        if (attr.name.empty())
          throw parse_error(source_name, line_no, "empty attribute name");
        for (const auto& existing : ds.schema)
          if (existing.name == attr.name)
            throw parse_error(source_name, line_no,
                              "duplicate attribute '" + attr.name + "'");
        ds.schema.push_back(std::move(attr));
      } else if (low.rfind("@data", 0) == 0) {
        if (ds.schema.empty())
          throw parse_error(source_name, line_no, "@data before any @attribute");
        in_data = true;
        ds.columns.resize(ds.schema.size());
      } else {
        throw parse_error(source_name, line_no, "unrecognized directive: " + t);
      }
      continue;
    }

    auto fields = split_fields(t);
    if (fields.size() != ds.schema.size())
      throw parse_error(source_name, line_no,
                        "row has " + std::to_string(fields.size()) +
                            " values, expected " + std::to_string(ds.schema.size()));
    for (std::size_t c = 0; c < fields.size(); ++c)
      append_cell(ds, c, fields[c], line_no);
    ++ds.n_rows;
  }

  if (!in_data)
    throw parse_error(source_name, line_no, "no @data section");
  return ds;
}

dataset parse_csv(std::istream& in, const std::string& source_name,
                  const std::vector<attribute_schema>* schema) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line))
    throw parse_error(source_name, 1, "empty input, expected a header row");
  ++line_no;
  auto header = split_fields(trim(line));

  if (schema) {
    if (schema->size() != header.size())
      throw parse_error(source_name, 1,
                        "header has " + std::to_string(header.size()) +
                            " columns, schema has " + std::to_string(schema->size()));
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] != (*schema)[i].name)
        throw parse_error(source_name, 1,
                          "header column '" + header[i] + "' does not match schema '" +
                              (*schema)[i].name + "'");
  }

  // collect raw cells first; kinds may need the whole column
  std::vector<std::vector<std::string>> raw(header.size());
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    auto fields = split_fields(t);
    if (fields.size() != header.size())
      throw parse_error(source_name, line_no,
                        "row has " + std::to_string(fields.size()) +
                            " values, expected " + std::to_string(header.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) raw[c].push_back(fields[c]);
    row_lines.push_back(line_no);
  }

  dataset ds;
  ds.source = source_name;
  ds.n_rows = raw.empty() ? 0 : raw[0].size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    attribute_schema attr;
    if (schema) {
      attr = (*schema)[c];
    } else {
      attr.name = header[c];
      bool all_numeric = true;
      double ignored;
      for (const auto& tok : raw[c])
        if (!is_missing_token(tok) && !parse_number(tok, ignored)) {
          all_numeric = false;
          break;
        }
      if (all_numeric) {
        attr.kind = attr_kind::numeric;
      } else {
        std::set<std::string> uniq;
        for (const auto& tok : raw[c])
          if (!is_missing_token(tok)) uniq.insert(unquote(tok));
        attr.levels.assign(uniq.begin(), uniq.end());
        attr.kind = nominal_kind(attr.levels);
      }
    }
    ds.schema.push_back(std::move(attr));
  }
  ds.columns.resize(ds.schema.size());
  for (std::size_t c = 0; c < ds.schema.size(); ++c)
    for (std::size_t r = 0; r < raw[c].size(); ++r)
      append_cell(ds, c, raw[c][r], row_lines[r]);
  return ds;
}

dataset load_arff(const std::string& path) {
  std::string bytes;
  std::uint64_t sum = file_checksum(path, bytes);
  std::istringstream in(bytes);
  dataset ds = parse_arff(in, path);
  ds.checksum = sum;
  return ds;
}

dataset load_csv(const std::string& path, const std::vector<attribute_schema>* schema) {
  std::string bytes;
  std::uint64_t sum = file_checksum(path, bytes);
  std::istringstream in(bytes);
  dataset ds = parse_csv(in, path, schema);
  ds.checksum = sum;
  return ds;
}

dataset load_table(const std::string& path) {
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
  if (ext == "arff") return load_arff(path);
  return load_csv(path);
}

void write_csv(const dataset& ds, std::ostream& out) {
  for (std::size_t c = 0; c < ds.schema.size(); ++c)
    out << (c ? "," : "") << ds.schema[c].name;
  out << "\n";
  for (std::size_t r = 0; r < ds.n_rows; ++r) {
    for (std::size_t c = 0; c < ds.schema.size(); ++c) {
      if (c) out << ",";
      if (ds.is_missing(r, c)) continue;  // missing writes as empty field
      if (ds.schema[c].is_numeric())
        out << format_number(ds.columns[c].num[r]);
      else
        out << ds.category_at(r, c);
    }
    out << "\n";
  }
}

void write_csv(const dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(ds, out);
}

std::vector<numeric_summary> summarize_numeric(const dataset& ds) {
  std::vector<numeric_summary> out;
  for (std::size_t c = 0; c < ds.schema.size(); ++c) {
    if (!ds.schema[c].is_numeric()) continue;
    numeric_summary s;
    s.column = ds.schema[c].name;
    double sum = 0.0;
    s.minimum = std::numeric_limits<double>::infinity();
    s.maximum = -std::numeric_limits<double>::infinity();
    for (double v : ds.columns[c].num) {
      if (std::isnan(v)) continue;
      ++s.n_present;
      sum += v;
      s.minimum = std::min(s.minimum, v);
      s.maximum = std::max(s.maximum, v);
    }
    if (s.n_present == 0)
      throw std::runtime_error("numeric column '" + s.column +
                               "' has no present values to summarize");
    s.mean = sum / static_cast<double>(s.n_present);
    if (s.n_present > 1) {
      double ss = 0.0;
      for (double v : ds.columns[c].num) {
        if (std::isnan(v)) continue;
        double d = v - s.mean;
        ss += d * d;
      }
      s.standard_deviation = std::sqrt(ss / static_cast<double>(s.n_present - 1));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace bmt
