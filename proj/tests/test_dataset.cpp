#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bmtkit/dataset.hpp"

namespace {

const char* kTinyArff =
    "% toy file\n"
    "@relation toy\n"
    "@attribute a numeric\n"
    "@attribute b {A,B}\n"
    "@data\n"
    "1.0,A\n"
    "?,B\n";

bmt::dataset parse_arff_string(const std::string& text) {
  std::istringstream in(text);
  return bmt::parse_arff(in);
}

bmt::dataset parse_csv_string(const std::string& text,
                              const std::vector<bmt::attribute_schema>* schema = nullptr) {
  std::istringstream in(text);
  return bmt::parse_csv(in, "<stream>", schema);
}

const bmt::numeric_summary& find_summary(const std::vector<bmt::numeric_summary>& all,
                                         const std::string& name) {
  for (const auto& s : all)
    if (s.column == name) return s;
  throw std::runtime_error("no summary for " + name);
}

bool datasets_cell_equal(const bmt::dataset& x, const bmt::dataset& y) {
  if (x.n_rows != y.n_rows || x.n_cols() != y.n_cols()) return false;
  for (std::size_t c = 0; c < x.n_cols(); ++c) {
    if (x.schema[c].name != y.schema[c].name) return false;
    if (x.schema[c].is_numeric() != y.schema[c].is_numeric()) return false;
    for (std::size_t r = 0; r < x.n_rows; ++r) {
      if (x.is_missing(r, c) != y.is_missing(r, c)) return false;
      if (x.is_missing(r, c)) continue;
      if (x.schema[c].is_numeric()) {
        if (x.columns[c].num[r] != y.columns[c].num[r]) return false;
      } else {
        if (x.category_at(r, c) != y.category_at(r, c)) return false;
      }
    }
  }
  return true;
}

std::string data_path(const char* file) { return std::string(BMT_DATA_DIR) + "/" + file; }

}  // namespace

TEST_CASE("arff parse: cells, kinds and missing markers") {
  auto ds = parse_arff_string(kTinyArff);
  CHECK(ds.relation == "toy");
  CHECK(ds.n_rows == 2);
  CHECK(ds.n_cols() == 2);
  CHECK(ds.schema[0].is_numeric());
  CHECK(ds.schema[1].kind == bmt::attr_kind::boolean);
  CHECK(ds.columns[0].num[0] == 1.0);
  CHECK(ds.is_missing(1, 0));
  CHECK(ds.category_at(0, 1) == "A");
  CHECK(ds.category_at(1, 1) == "B");
}

TEST_CASE("arff parse: arity mismatch reports the offending line") {
  std::string text =
      "@relation t\n@attribute a numeric\n@attribute b numeric\n@data\n1,2\n1,2,3\n";
  try {
    parse_arff_string(text);
    FAIL("expected parse_error");
  } catch (const bmt::parse_error& e) {
    CHECK(e.line == 6);
    CHECK(std::string(e.what()).find("3 values") != std::string::npos);
  }
}

TEST_CASE("arff parse: bad number names column and line") {
  std::string text = "@relation t\n@attribute a numeric\n@data\nx\n";
  try {
    parse_arff_string(text);
    FAIL("expected parse_error");
  } catch (const bmt::parse_error& e) {
    CHECK(e.line == 4);
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }
}

TEST_CASE("arff parse: undeclared level appended with a warning") {
  std::string text = "@relation t\n@attribute b {A,B}\n@data\nC\n";
  auto ds = parse_arff_string(text);
  CHECK(ds.schema[0].levels.size() == 3);
  CHECK(ds.category_at(0, 0) == "C");
  REQUIRE(ds.warnings.size() == 1);
  CHECK(ds.warnings[0].find("undeclared level 'C'") != std::string::npos);
}

TEST_CASE("csv parse: kind inference and missing tokens") {
  auto ds = parse_csv_string("a,b\n1,x\n?,y\n,x\n");
  CHECK(ds.n_rows == 3);
  CHECK(ds.schema[0].is_numeric());
  CHECK_FALSE(ds.schema[1].is_numeric());
  CHECK(ds.is_missing(1, 0));
  CHECK(ds.is_missing(2, 0));
  CHECK(ds.category_at(2, 1) == "x");
}

TEST_CASE("csv parse: arity error") {
  CHECK_THROWS_AS(parse_csv_string("a,b\n1,2,3\n"), bmt::parse_error);
}

TEST_CASE("csv parse: schema name mismatch") {
  auto ds = parse_arff_string(kTinyArff);
  CHECK_THROWS_AS(parse_csv_string("a,wrong\n1,A\n", &ds.schema), bmt::parse_error);
}

TEST_CASE("summaries: constant column and missing exclusion") {
  auto ds = parse_csv_string("k,m\n5,1\n5,\n5,3\n");
  auto sums = summarize_numeric(ds);
  const auto& k = find_summary(sums, "k");
  CHECK(k.mean == 5.0);
  CHECK(k.standard_deviation == 0.0);
  CHECK(k.minimum == 5.0);
  CHECK(k.maximum == 5.0);
  const auto& m = find_summary(sums, "m");
  CHECK(m.n_present == 2);
  CHECK(m.mean == 2.0);
}

TEST_CASE("summaries: all-missing numeric column is an error") {
  auto ds = parse_csv_string("a,b\n,x\n,y\n");
  try {
    summarize_numeric(ds);
    FAIL("expected an error for the all-missing column");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }
}

TEST_CASE("target column validation") {
  auto ds = parse_arff_string(kTinyArff);
  ds.set_target("b");
  CHECK(ds.target_column == "b");
  CHECK_THROWS(ds.set_target("a"));
  CHECK_THROWS(ds.set_target("nope"));
}

TEST_CASE("bundled dataset: shape, checksum, summary table") {
  auto ds = bmt::load_arff(data_path("bone_marrow.arff"));
  CHECK(ds.n_rows == 187);
  CHECK(ds.n_cols() == 37);
  CHECK(ds.checksum != 0);
  CHECK(ds.warnings.empty());
  ds.set_target("survival_status");

  auto sums = summarize_numeric(ds);
  CHECK(sums.size() == 10);
  const auto& donor = find_summary(sums, "donor_age");
  CHECK(std::abs(donor.maximum - 55.5534) < 1e-3);
  CHECK(std::abs(donor.minimum - 18.6466) < 1e-3);
  CHECK(std::abs(donor.mean - 33.4721) < 1e-3);
  CHECK(std::abs(donor.standard_deviation - 8.2718) < 1e-3);
  const auto& plt = find_summary(sums, "PLT_recovery");
  CHECK(plt.maximum == 1000000.0);
  for (const auto& s : sums) {
    CHECK(s.minimum <= s.mean);
    CHECK(s.mean <= s.maximum);
    CHECK(s.standard_deviation >= 0.0);
  }
}

TEST_CASE("bundled dataset: csv parse with arff schema matches cell for cell") {
  auto arff = bmt::load_arff(data_path("bone_marrow.arff"));
  auto csv = bmt::load_csv(data_path("bone_marrow.csv"), &arff.schema);
  CHECK(datasets_cell_equal(arff, csv));
}

TEST_CASE("csv round-trip with the same schema is lossless") {
  auto ds = bmt::load_arff(data_path("bone_marrow.arff"));
  std::ostringstream out;
  bmt::write_csv(ds, out);
  auto back = parse_csv_string(out.str(), &ds.schema);
  CHECK(datasets_cell_equal(ds, back));
}
