#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gridwatch::cli {

namespace {

constexpr double kWidth = 720.0, kHeight = 440.0;
constexpr double kLeft = 64.0, kRight = 20.0, kTop = 44.0, kBottom = 52.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

const char* kPalette[] = {"#4878a8", "#e49444", "#d1605e", "#85b6b2",
                          "#6a9f58", "#9467bd"};
constexpr int kPaletteSize = 6;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void open_svg(std::ostringstream& svg, const std::string& stamp) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<!-- " << stamp << " -->\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"#ffffff\"/>\n";
}

void draw_frame(std::ostringstream& svg, const std::string& title,
                const std::string& x_label, const std::string& y_label) {
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\" fill=\"#222\">"
      << title << "</text>\n";
  svg << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" fill=\"#222\">"
      << x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + kPlotH / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" fill=\"#222\" transform=\"rotate(-90 16 "
      << kTop + kPlotH / 2 << ")\">" << y_label << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW
      << "\" height=\"" << kPlotH
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
}

void draw_y_ticks(std::ostringstream& svg, double y_min, double y_max) {
  for (int t = 0; t <= 5; ++t) {
    const double v = y_min + (y_max - y_min) * t / 5.0;
    const double y = kTop + kPlotH - kPlotH * t / 5.0;
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\""
        << kLeft + kPlotW << "\" y2=\"" << num(y)
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\" fill=\"#222\">"
        << tick_label(v) << "</text>\n";
  }
}

void draw_legend(std::ostringstream& svg,
                 const std::vector<std::string>& labels) {
  if (labels.size() < 2) return;
  double x = kLeft + 12.0;
  const double y = kTop + 14.0;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    svg << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << num(x + 14) << "\" y=\"" << num(y)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#222\">"
        << labels[s] << "</text>\n";
    x += 14.0 + 7.0 * labels[s].size() + 16.0;
  }
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label,
                      const std::vector<Series>& series,
                      const std::string& stamp) {
  double x_min = 0.0, x_max = 1.0, y_max = 1.0;
  bool first = true;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_min = first ? s.x[i] : std::min(x_min, s.x[i]);
      x_max = first ? s.x[i] : std::max(x_max, s.x[i]);
      y_max = std::max(y_max, s.y[i]);
      first = false;
    }
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  const double y_min = 0.0;

  const auto px = [&](double v) {
    return kLeft + kPlotW * (v - x_min) / (x_max - x_min);
  };
  const auto py = [&](double v) {
    return kTop + kPlotH - kPlotH * (v - y_min) / (y_max - y_min);
  };

  std::ostringstream svg;
  open_svg(svg, stamp);
  draw_frame(svg, title, x_label, y_label);
  draw_y_ticks(svg, y_min, y_max);
  for (int t = 0; t <= 5; ++t) {
    const double v = x_min + (x_max - x_min) * t / 5.0;
    svg << "<text x=\"" << num(px(v)) << "\" y=\"" << kTop + kPlotH + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\" fill=\"#222\">"
        << tick_label(v) << "</text>\n";
  }

  std::vector<std::string> labels;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    labels.push_back(series[s].label);
    std::ostringstream points;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (i) points << " ";
      points << num(px(series[s].x[i])) << "," << num(py(series[s].y[i]));
    }
    svg << "<polyline points=\"" << points.str()
        << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    for (std::size_t i = 0; i < series[s].x.size(); ++i)
      svg << "<circle cx=\"" << num(px(series[s].x[i])) << "\" cy=\""
          << num(py(series[s].y[i])) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
  }
  draw_legend(svg, labels);
  svg << "</svg>\n";
  return svg.str();
}

std::string bar_plot(const std::string& title, const std::string& x_label,
                     const std::string& y_label,
                     const std::vector<std::string>& categories,
                     const std::vector<std::string>& series_labels,
                     const std::vector<std::vector<double>>& values,
                     double threshold, const std::string& stamp) {
  double y_max = threshold > 0.0 ? threshold : 0.0;
  for (const auto& row : values)
    for (double v : row) y_max = std::max(y_max, v);
  y_max = y_max > 0.0 ? y_max * 1.15 : 1.0;

  const std::size_t n_cat = categories.size();
  const std::size_t n_ser = std::max<std::size_t>(1, values.size());
  const double group_w = kPlotW / std::max<std::size_t>(1, n_cat);
  const double bar_w = group_w * 0.8 / n_ser;
  const auto py = [&](double v) { return kTop + kPlotH - kPlotH * v / y_max; };

  std::ostringstream svg;
  open_svg(svg, stamp);
  draw_frame(svg, title, x_label, y_label);
  draw_y_ticks(svg, 0.0, y_max);

  for (std::size_t c = 0; c < n_cat; ++c) {
    const double gx = kLeft + group_w * c;
    for (std::size_t s = 0; s < values.size(); ++s) {
      const double v = c < values[s].size() ? values[s][c] : 0.0;
      const double x = gx + group_w * 0.1 + bar_w * s;
      svg << "<rect x=\"" << num(x) << "\" y=\"" << num(py(v)) << "\" width=\""
          << num(bar_w) << "\" height=\"" << num(kTop + kPlotH - py(v))
          << "\" fill=\"" << kPalette[s % kPaletteSize] << "\"/>\n";
    }
    svg << "<text x=\"" << num(gx + group_w / 2) << "\" y=\""
        << kTop + kPlotH + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\" fill=\"#222\">"
        << categories[c] << "</text>\n";
  }

  if (threshold > 0.0) {
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(threshold))
        << "\" x2=\"" << kLeft + kPlotW << "\" y2=\"" << num(py(threshold))
        << "\" stroke=\"#b22\" stroke-width=\"1.5\" "
           "stroke-dasharray=\"6 4\"/>\n";
    svg << "<text x=\"" << kLeft + kPlotW - 4 << "\" y=\""
        << num(py(threshold) - 5)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\" fill=\"#b22\">threshold "
        << tick_label(threshold) << "</text>\n";
  }
  draw_legend(svg, series_labels);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gridwatch::cli
