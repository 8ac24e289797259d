#pragma once

// Minimal SVG line plots. Input is always a CSV file on disk so that figures
// can be regenerated without rerunning an experiment.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "becl/lab/io.hpp"

namespace becl::lab {

struct PlotSpec {
  std::string title;
  std::string x;               // column name
  std::vector<std::string> y;  // column names; empty means every other column
  bool log_x = false;
  bool log_y = false;
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

inline std::string render_svg(const CsvTable& t, PlotSpec spec) {
  if (spec.y.empty())
    for (const auto& c : t.columns)
      if (c != spec.x) spec.y.push_back(c);
  const auto xs = t.values(spec.x);
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [](bool log, double v) { return std::isfinite(v) && (!log || v > 0.0); };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  std::vector<std::vector<double>> ys;
  for (const auto& name : spec.y) ys.push_back(t.values(name));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!usable(spec.log_x, xs[i])) continue;
    x0 = std::min(x0, tx(xs[i]));
    x1 = std::max(x1, tx(xs[i]));
    for (const auto& col : ys) {
      if (!usable(spec.log_y, col[i])) continue;
      y0 = std::min(y0, ty(col[i]));
      y1 = std::max(y1, ty(col[i]));
    }
  }
  if (!(x1 >= x0)) x0 = 0.0, x1 = 1.0;
  if (!(y1 >= y0)) y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;

  const double w = 640, h = 400, ml = 70, mr = 150, mt = 40, mb = 50;
  auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * (w - ml - mr); };
  auto py = [&](double v) { return h - mb - (ty(v) - y0) / (y1 - y0) * (h - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + detail::num(w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       detail::svg_escape(spec.title) + "</text>\n";
  s += "<rect x=\"" + detail::num(ml) + "\" y=\"" + detail::num(mt) + "\" width=\"" + detail::num(w - ml - mr) +
       "\" height=\"" + detail::num(h - mt - mb) + "\" fill=\"none\" stroke=\"black\"/>\n";
  auto tick = [](bool log, double v) { return detail::num(log ? std::pow(10.0, v) : v); };
  s += "<text x=\"" + detail::num(ml) + "\" y=\"" + detail::num(h - mb + 16) + "\">" + tick(spec.log_x, x0) + "</text>\n";
  s += "<text x=\"" + detail::num(w - mr) + "\" y=\"" + detail::num(h - mb + 16) + "\" text-anchor=\"end\">" +
       tick(spec.log_x, x1) + "</text>\n";
  s += "<text x=\"" + detail::num(ml - 4) + "\" y=\"" + detail::num(h - mb) + "\" text-anchor=\"end\">" +
       tick(spec.log_y, y0) + "</text>\n";
  s += "<text x=\"" + detail::num(ml - 4) + "\" y=\"" + detail::num(mt + 10) + "\" text-anchor=\"end\">" +
       tick(spec.log_y, y1) + "</text>\n";
  s += "<text x=\"" + detail::num((ml + w - mr) / 2) + "\" y=\"" + detail::num(h - 12) + "\" text-anchor=\"middle\">" +
       detail::svg_escape(spec.x) + (spec.log_x ? " (log)" : "") + "</text>\n";

  for (std::size_t c = 0; c < ys.size(); ++c) {
    const char* color = colors[c % std::size(colors)];
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!usable(spec.log_x, xs[i]) || !usable(spec.log_y, ys[c][i])) continue;
      pts += detail::num(px(xs[i])) + "," + detail::num(py(ys[c][i])) + " ";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = mt + 14 + 16 * static_cast<double>(c);
    s += "<line x1=\"" + detail::num(w - mr + 10) + "\" y1=\"" + detail::num(ly - 4) + "\" x2=\"" +
         detail::num(w - mr + 30) + "\" y2=\"" + detail::num(ly - 4) + "\" stroke=\"" + color + "\"/>\n";
    s += "<text x=\"" + detail::num(w - mr + 34) + "\" y=\"" + detail::num(ly) + "\">" + detail::svg_escape(spec.y[c]) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

/// Read `csv`, write the figure next to it (or to `svg`).
inline fs::path plot_csv(const fs::path& csv, const PlotSpec& spec, fs::path svg = {}) {
  if (svg.empty()) svg = fs::path(csv).replace_extension(".svg");
  write_text(svg, render_svg(CsvTable::read(csv), spec));
  return svg;
}

}  // namespace becl::lab
