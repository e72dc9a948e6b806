#pragma once

#include <string>

#include "bmtkit/chi2.hpp"
#include "bmtkit/dataset.hpp"
#include "bmtkit/preprocess.hpp"

namespace fixtures {

inline std::string data_path(const char* file) {
  return std::string(BMT_DATA_DIR) + "/" + file;
}

// Parsed bundled dataset with the target set; cached across test cases.
inline const bmt::dataset& bone_marrow() {
  static const bmt::dataset ds = [] {
    auto d = bmt::load_arff(data_path("bone_marrow.arff"));
    d.set_target("survival_status");
    return d;
  }();
  return ds;
}

// Imputed + encoded (unscaled) matrix of the bundled dataset.
inline const bmt::design_matrix& bone_marrow_matrix() {
  static const bmt::design_matrix m = [] {
    const auto& ds = bone_marrow();
    auto imputed = bmt::apply_imputer(ds, bmt::fit_imputer(ds));
    auto enc = bmt::fit_encoding(imputed);
    return bmt::apply_encoding(imputed, enc, "survival_status", "1");
  }();
  return m;
}

}  // namespace fixtures
