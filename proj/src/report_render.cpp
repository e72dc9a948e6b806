#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "bmtkit/dataset.hpp"
#include "bmtkit/experiments.hpp"

namespace bmt {

namespace {

constexpr const char* kPalette[7] = {"#4472c4", "#ed7d31", "#70ad47",
                                     "#ffc000", "#5b9bd5", "#c00000",
                                     "#7030a0"};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("report: cannot write '" + path + "'");
  return out;
}

std::string fmt(double v) { return format_number(v); }

void write_metrics_csv(const experiment_report& r, const std::string& path) {
  auto out = open_out(path);
  out << "model,accuracy,precision,recall,f1,roc_auc\n";
  for (const auto& m : r.models)
    out << algorithm_name(m.algo) << ',' << fmt(m.metrics.accuracy) << ','
        << fmt(m.metrics.precision) << ',' << fmt(m.metrics.recall) << ','
        << fmt(m.metrics.f1) << ',' << fmt(m.roc_auc) << '\n';
}

// plot area of the ROC overlay: 400x400 with room for a right-hand legend
constexpr double kLeft = 60, kTop = 30, kSize = 400;

std::string rx(double fpr) { return fmt(kLeft + kSize * fpr); }
std::string ry(double tpr) { return fmt(kTop + kSize * (1.0 - tpr)); }

void write_roc_overlay(const experiment_report& r, const std::string& path) {
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"660\" "
         "height=\"520\" font-family=\"sans-serif\" font-size=\"13\">\n"
      << "<rect width=\"660\" height=\"520\" fill=\"white\"/>\n"
      << "<text x=\"260\" y=\"18\" text-anchor=\"middle\">ROC, experiment "
      << r.config.id << "</text>\n";
  // frame and ticks
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double v = i / 5.0;
    out << "<text x=\"" << rx(v) << "\" y=\"" << kTop + kSize + 18
        << "\" text-anchor=\"middle\">" << fmt(v) << "</text>\n"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << ry(v)
        << "\" text-anchor=\"end\" dominant-baseline=\"middle\">" << fmt(v)
        << "</text>\n";
  }
  out << "<text x=\"" << kLeft + kSize / 2 << "\" y=\"" << kTop + kSize + 42
      << "\" text-anchor=\"middle\">false positive rate</text>\n"
      << "<text x=\"16\" y=\"" << kTop + kSize / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + kSize / 2 << ")\">true positive rate</text>\n";
  out << "<line x1=\"" << rx(0) << "\" y1=\"" << ry(0) << "\" x2=\"" << rx(1)
      << "\" y2=\"" << ry(1)
      << "\" stroke=\"#999\" stroke-dasharray=\"6 4\"/>\n";

  for (std::size_t i = 0; i < r.models.size(); ++i) {
    const auto& m = r.models[i];
    const char* color = kPalette[i % 7];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t p = 0; p < m.roc.size(); ++p) {
      if (p) out << ' ';
      out << rx(m.roc.fpr[p]) << ',' << ry(m.roc.tpr[p]);
    }
    out << "\"/>\n";
    double y = 60.0 + 26.0 * static_cast<double>(i);
    out << "<line x1=\"480\" y1=\"" << fmt(y - 4) << "\" x2=\"508\" y2=\""
        << fmt(y - 4) << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n"
        << "<text x=\"516\" y=\"" << fmt(y) << "\">" << algorithm_name(m.algo)
        << " auc=" << fmt(m.roc_auc) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_metric_bars(const experiment_report& r, const std::string& path) {
  const char* metric_names[5] = {"accuracy", "precision", "recall", "f1",
                                 "roc_auc"};
  const double bar_w = 11, group_w = 5 * bar_w + 16, plot_h = 300;
  const double left = 50, top = 56;
  const double width = left + group_w * static_cast<double>(r.models.size()) + 20;

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"396\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"" << fmt(width)
      << "\" height=\"396\" fill=\"white\"/>\n";
  for (int i = 0; i < 5; ++i) {
    double x = left + 95.0 * i;
    out << "<rect x=\"" << fmt(x) << "\" y=\"12\" width=\"10\" height=\"10\" "
           "fill=\""
        << kPalette[i] << "\"/>\n"
        << "<text x=\"" << fmt(x + 14) << "\" y=\"22\">" << metric_names[i]
        << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    double v = i / 4.0, y = top + plot_h * (1.0 - v);
    out << "<line x1=\"" << left << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(width - 20) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#ddd\"/>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
  }
  for (std::size_t g = 0; g < r.models.size(); ++g) {
    const auto& m = r.models[g];
    double gx = left + group_w * static_cast<double>(g) + 8;
    const double values[5] = {m.metrics.accuracy, m.metrics.precision,
                              m.metrics.recall, m.metrics.f1, m.roc_auc};
    for (int i = 0; i < 5; ++i) {
      double h = plot_h * values[i];
      out << "<rect x=\"" << fmt(gx + bar_w * i) << "\" y=\""
          << fmt(top + plot_h - h) << "\" width=\"" << fmt(bar_w - 1)
          << "\" height=\"" << fmt(h) << "\" fill=\"" << kPalette[i]
          << "\"/>\n";
    }
    out << "<text x=\"" << fmt(gx + 2.5 * bar_w) << "\" y=\""
        << fmt(top + plot_h + 18) << "\" text-anchor=\"middle\">"
        << algorithm_name(m.algo) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_time_bars(const experiment_report& r, const std::string& path) {
  double max_s = 0.0;
  for (const auto& m : r.models) max_s = std::max(max_s, m.search_seconds);
  if (max_s <= 0.0) max_s = 1.0;
  const double bar_w = 34, gap = 26, plot_h = 240, left = 50, top = 40;
  const double width =
      left + (bar_w + gap) * static_cast<double>(r.models.size()) + 20;

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"340\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"" << fmt(width)
      << "\" height=\"340\" fill=\"white\"/>\n"
      << "<text x=\"" << fmt(width / 2)
      << "\" y=\"20\" text-anchor=\"middle\">grid search seconds, experiment "
      << r.config.id << "</text>\n";
  for (std::size_t i = 0; i < r.models.size(); ++i) {
    const auto& m = r.models[i];
    double x = left + (bar_w + gap) * static_cast<double>(i);
    double h = plot_h * m.search_seconds / max_s;
    char label[32];
    std::snprintf(label, sizeof label, "%.2f", m.search_seconds);
    out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(top + plot_h - h)
        << "\" width=\"" << bar_w << "\" height=\"" << fmt(h)
        << "\" fill=\"" << kPalette[i % 7] << "\"/>\n"
        << "<text x=\"" << fmt(x + bar_w / 2) << "\" y=\""
        << fmt(top + plot_h - h - 6) << "\" text-anchor=\"middle\">" << label
        << "</text>\n"
        << "<text x=\"" << fmt(x + bar_w / 2) << "\" y=\""
        << fmt(top + plot_h + 18) << "\" text-anchor=\"middle\">"
        << algorithm_name(m.algo) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

std::vector<std::string> emit_report(const experiment_report& r,
                                     const std::set<std::string>& formats,
                                     const std::string& out_dir) {
  for (const auto& f : formats)
    if (f != "json" && f != "csv" && f != "svg")
      throw std::invalid_argument("report: unknown format '" + f + "'");
  std::filesystem::create_directories(out_dir);
  auto path = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  std::vector<std::string> written;

  if (formats.count("json")) {
    auto p = path("report.json");
    open_out(p) << report_to_json(r).dump(2) << '\n';
    written.push_back(p);
  }
  if (formats.count("csv")) {
    auto p = path("metrics.csv");
    write_metrics_csv(r, p);
    written.push_back(p);
    p = path("ranking.csv");
    {
      auto out = open_out(p);
      write_ranking_csv(r.ranking, out);
    }
    written.push_back(p);
    for (const auto& m : r.models) {
      p = path("roc_" + algorithm_name(m.algo) + ".csv");
      auto out = open_out(p);
      write_roc_csv(out, m.roc);
      written.push_back(p);
    }
  }
  if (formats.count("svg")) {
    auto p = path("roc_overlay.svg");
    write_roc_overlay(r, p);
    written.push_back(p);
    p = path("metric_bars.svg");
    write_metric_bars(r, p);
    written.push_back(p);
    if (r.config.hpo.enabled) {
      p = path("search_times.svg");
      write_time_bars(r, p);
      written.push_back(p);
    }
  }
  return written;
}

}  // namespace bmt
