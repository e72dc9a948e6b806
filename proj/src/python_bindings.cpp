#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bmtkit/experiments.hpp"

namespace py = pybind11;

namespace {

py::object to_py(const nlohmann::ordered_json& j) {
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      py::dict d;
      for (const auto& [key, value] : j.items())
        d[py::str(key)] = to_py(value);
      return d;
    }
    case nlohmann::ordered_json::value_t::array: {
      py::list l;
      for (const auto& value : j) l.append(to_py(value));
      return l;
    }
    case nlohmann::ordered_json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::ordered_json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::ordered_json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case nlohmann::ordered_json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case nlohmann::ordered_json::value_t::number_float:
      return py::float_(j.get<double>());
    default:
      return py::none();
  }
}

nlohmann::json to_json(py::handle h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::dict>(h)) {
    nlohmann::json j = nlohmann::json::object();
    for (auto item : h.cast<py::dict>())
      j[item.first.cast<std::string>()] = to_json(item.second);
    return j;
  }
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
    nlohmann::json j = nlohmann::json::array();
    for (auto item : h.cast<py::sequence>()) j.push_back(to_json(item));
    return j;
  }
  throw py::type_error("expected a JSON-compatible value");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "survival classification toolkit for transplant outcome data";

  m.def(
      "summarize",
      [](const std::string& path) {
        auto ds = bmt::load_table(path);
        py::list rows;
        for (const auto& s : bmt::summarize_numeric(ds)) {
          py::dict d;
          d["column"] = s.column;
          d["present"] = s.n_present;
          d["min"] = s.minimum;
          d["max"] = s.maximum;
          d["mean"] = s.mean;
          d["std"] = s.standard_deviation;
          rows.append(d);
        }
        return rows;
      },
      py::arg("path"),
      "Load an ARFF or CSV table and summarize its numeric columns.");

  m.def(
      "rank",
      [](const std::string& path, const std::string& target,
         const std::string& positive_level, bool drop_leaky) {
        auto ds = bmt::load_table(path);
        ds.set_target(target);
        auto imputed = bmt::apply_imputer(ds, bmt::fit_imputer(ds));
        auto matrix = bmt::apply_encoding(imputed, bmt::fit_encoding(imputed),
                                          target, positive_level);
        if (drop_leaky) matrix = bmt::strip_leaky(matrix);
        py::list rows;
        for (const auto& e : bmt::rank_features(matrix).entries) {
          py::dict d;
          d["attribute"] = e.column;
          d["score"] = e.score;
          d["original_index"] = e.original_index;
          rows.append(d);
        }
        return rows;
      },
      py::arg("path"), py::arg("target") = "survival_status",
      py::arg("positive_level") = "1", py::arg("drop_leaky") = false,
      "Impute, encode, and rank features by chi-squared score.");

  m.def(
      "preset",
      [](const std::string& experiment, const std::string& dataset) {
        return to_py(
            bmt::config_to_json(bmt::experiment_preset(experiment, dataset)));
      },
      py::arg("experiment"), py::arg("dataset"),
      "Configuration dict for one of the stock experiment designs.");

  m.def(
      "run",
      [](py::dict config) {
        auto cfg = bmt::config_from_json(to_json(config));
        return to_py(bmt::report_to_json(bmt::run_experiment(cfg)));
      },
      py::arg("config"),
      "Run an experiment from a configuration dict; returns the report.");

  m.def(
      "emit",
      [](py::dict report, const std::vector<std::string>& formats,
         const std::string& out_dir) {
        auto r = bmt::report_from_json(to_json(report));
        return bmt::emit_report(
            r, std::set<std::string>(formats.begin(), formats.end()), out_dir);
      },
      py::arg("report"), py::arg("formats"), py::arg("out_dir"),
      "Write a report dict out as json, csv, or svg artifacts.");

  m.def(
      "compare",
      [](py::sequence reports) {
        std::vector<bmt::experiment_report> rs;
        for (auto item : reports)
          rs.push_back(bmt::report_from_json(to_json(item)));
        return to_py(bmt::comparison_to_json(bmt::compare_experiments(rs)));
      },
      py::arg("reports"),
      "Side-by-side comparison table for two or more report dicts.");
}
