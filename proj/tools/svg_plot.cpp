// Copyright 2026 The qdcg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qdcg::tools {

namespace {

constexpr double kPanelWidth = 480.0;
constexpr double kPanelHeight = 360.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string num(double v, const char* format = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string escape(const std::string& s) {
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

void draw_panel(std::ostringstream& svg, const Panel& panel, double x0) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : panel.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0.0)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax == ymin) ymax += 1.0;

  const double left = x0 + kMarginLeft;
  const double right = x0 + kPanelWidth - kMarginRight;
  const double top = kMarginTop;
  const double bottom = kPanelHeight - kMarginBottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
  auto py = [&](double ly) { return bottom - (ly - ymin) / (ymax - ymin) * (bottom - top); };

  svg << "<g class=\"panel\">\n";
  svg << "<text x=\"" << num((left + right) / 2) << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"14\">" << escape(panel.title) << "</text>\n";
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left)
      << "\" height=\"" << num(bottom - top) << "\" fill=\"none\" stroke=\"#000\"/>\n";

  for (double e = ymin; e <= ymax + 1e-9; e += 1.0) {
    const double y = py(e);
    svg << "<line x1=\"" << num(left) << "\" x2=\"" << num(right) << "\" y1=\"" << num(y)
        << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">1e" << num(e, "%.0f") << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    svg << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(bottom + 16)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << num(xv, "%g") << "</text>\n";
  }
  svg << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(kPanelHeight - 12)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(panel.x_label) << "</text>\n";
  svg << "<text transform=\"translate(" << num(x0 + 16) << "," << num((top + bottom) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << escape(panel.y_label)
      << "</text>\n";

  for (std::size_t k = 0; k < panel.series.size(); ++k) {
    const auto& s = panel.series[k];
    const char* color = kColors[k % 4];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0.0)) continue;
      points += num(px(s.x[i])) + "," + num(py(std::log10(s.y[i]))) + " ";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << points << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0.0)) continue;
      svg << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(std::log10(s.y[i])))
          << "\" r=\"2.5\" fill=\"" << color << "\" data-series=\"" << escape(s.label)
          << "\" data-x=\"" << num(s.x[i], "%.17g") << "\" data-y=\"" << num(s.y[i], "%.17g")
          << "\"/>\n";
    }
    const double ly = top + 14 + 16 * static_cast<double>(k);
    svg << "<line x1=\"" << num(right - 120) << "\" x2=\"" << num(right - 100) << "\" y1=\""
        << num(ly) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(right - 95) << "\" y=\"" << num(ly + 4) << "\" font-size=\"11\">"
        << escape(s.label) << "</text>\n";
  }
  svg << "</g>\n";
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels) {
  std::ostringstream svg;
  const double width = kPanelWidth * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width, "%.0f")
      << "\" height=\"" << num(kPanelHeight, "%.0f") << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    draw_panel(svg, panels[i], kPanelWidth * static_cast<double>(i));
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace qdcg::tools
