#include "raman/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "raman/errors.hpp"

namespace raman {

namespace {

// Blue -> white -> red.
void colormap(double t, int& r, int& g, int& b) {
  t = std::clamp(t, 0.0, 1.0);
  if (t < 0.5) {
    const double u = t * 2.0;
    r = static_cast<int>(255 * u);
    g = static_cast<int>(255 * u);
    b = 255;
  } else {
    const double u = (t - 0.5) * 2.0;
    r = 255;
    g = static_cast<int>(255 * (1.0 - u));
    b = static_cast<int>(255 * (1.0 - u));
  }
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

void svg_heatmap(const Matrix& values, const std::string& title,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("svg_heatmap: cannot open " + path);

  double lo = values.data.empty() ? 0.0 : values.data[0], hi = lo;
  for (double v : values.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) hi = lo + 1e-12;

  const int cell = 8;
  const int w = static_cast<int>(values.cols) * cell;
  const int h = static_cast<int>(values.rows) * cell;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns='http://www.w3.org/2000/svg' width='%d' "
                "height='%d'>\n",
                w, h + 24);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<text x='4' y='16' font-family='sans-serif' "
                "font-size='13'>%s  [%.2f, %.2f]</text>\n",
                title.c_str(), lo, hi);
  out << buf;
  for (std::size_t r = 0; r < values.rows; ++r) {
    for (std::size_t c = 0; c < values.cols; ++c) {
      int cr, cg, cb;
      colormap((values.at(r, c) - lo) / (hi - lo), cr, cg, cb);
      std::snprintf(buf, sizeof buf,
                    "<rect x='%zu' y='%zu' width='%d' height='%d' "
                    "fill='rgb(%d,%d,%d)'/>\n",
                    c * cell, 24 + r * cell, cell, cell, cr, cg, cb);
      out << buf;
    }
  }
  out << "</svg>\n";
  if (!out) throw IoError("svg_heatmap: write failed for " + path);
}

void svg_lines(const std::vector<std::vector<double>>& series,
               const std::vector<std::string>& labels, const std::string& title,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("svg_lines: cannot open " + path);

  double lo = 0.0, hi = 1e-12;
  std::size_t n = 1;
  for (const auto& s : series)
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  for (const auto& s : series) n = std::max(n, s.size());
  if (hi - lo < 1e-12) hi = lo + 1e-12;

  const int w = 640, h = 360, margin = 40;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns='http://www.w3.org/2000/svg' width='%d' "
                "height='%d'>\n<rect width='%d' height='%d' fill='white'/>\n",
                w, h, w, h);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<text x='8' y='18' font-family='sans-serif' "
                "font-size='13'>%s</text>\n",
                title.c_str());
  out << buf;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.size() < 2) continue;
    out << "<polyline fill='none' stroke='"
        << kPalette[si % (sizeof kPalette / sizeof *kPalette)]
        << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double x =
          margin + (w - 2.0 * margin) * static_cast<double>(i) /
                       static_cast<double>(n - 1);
      const double y = h - margin - (h - 2.0 * margin) * (s[i] - lo) / (hi - lo);
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", x, y);
      out << buf;
    }
    out << "'/>\n";
    if (si < labels.size()) {
      std::snprintf(buf, sizeof buf,
                    "<text x='%d' y='%zu' font-family='sans-serif' "
                    "font-size='12' fill='%s'>%s</text>\n",
                    w - margin - 140, 20 + 16 * (si + 1),
                    kPalette[si % (sizeof kPalette / sizeof *kPalette)],
                    labels[si].c_str());
      out << buf;
    }
  }
  out << "</svg>\n";
  if (!out) throw IoError("svg_lines: write failed for " + path);
}

}  // namespace raman
