#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmt {

// Structured failure with the offending source location attached.
struct parse_error : std::runtime_error {
  parse_error(std::string source, std::size_t line, const std::string& message);
  std::string source;
  std::size_t line;
};

enum class attr_kind { numeric, categorical, boolean };

struct attribute_schema {
  std::string name;
  attr_kind kind = attr_kind::numeric;
  std::vector<std::string> levels;  // declaration order; empty for numeric

  bool is_numeric() const { return kind == attr_kind::numeric; }
};

// One column of cells.  Numeric cells are doubles with NaN marking a missing
// value; categorical cells are indices into the schema's level list with -1
// marking a missing value.
struct column_data {
  std::vector<double> num;
  std::vector<int> cat;
};

struct dataset {
  std::string relation;
  std::vector<attribute_schema> schema;
  std::vector<column_data> columns;  // parallel to schema
  std::size_t n_rows = 0;
  std::string target_column;         // set explicitly, see set_target
  std::string source;                // file or stream name
  std::uint64_t checksum = 0;        // fnv-1a over the raw input bytes
  std::vector<std::string> warnings;

  std::size_t n_cols() const { return schema.size(); }
  std::size_t col_index(const std::string& name) const;  // throws if absent
  bool has_column(const std::string& name) const;

  bool is_missing(std::size_t row, std::size_t col) const;
  // categorical cell as its level string; numeric cells throw
  const std::string& category_at(std::size_t row, std::size_t col) const;

  // Validates that the column exists and has exactly two observed levels,
  // then records it as the classification target.
  void set_target(const std::string& name);
};

struct numeric_summary {
  std::string column;
  std::size_t n_present = 0;
  double minimum = 0.0;
  double maximum = 0.0;
  double mean = 0.0;
  double standard_deviation = 0.0;  // n-1 divisor
};

dataset parse_arff(std::istream& in, const std::string& source_name = "<stream>");
// Kinds are taken from schema when given, otherwise inferred: a column whose
// non-missing cells all parse as numbers is numeric, anything else is
// categorical.  "?" and the empty string both mark missing cells.
dataset parse_csv(std::istream& in, const std::string& source_name = "<stream>",
                  const std::vector<attribute_schema>* schema = nullptr);

dataset load_arff(const std::string& path);
dataset load_csv(const std::string& path,
                 const std::vector<attribute_schema>* schema = nullptr);
// dispatches on the file extension (.arff vs anything else)
dataset load_table(const std::string& path);

void write_csv(const dataset& ds, std::ostream& out);
void write_csv(const dataset& ds, const std::string& path);

// shortest round-trip decimal form, the same one write_csv emits
std::string format_number(double v);

// One summary per numeric column, computed over present cells only.
// A numeric column with zero present cells is an error naming the column.
std::vector<numeric_summary> summarize_numeric(const dataset& ds);

}  // namespace bmt
