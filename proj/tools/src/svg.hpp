#pragma once

#include <string>
#include <vector>

namespace gridwatch::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained line chart (one polyline per series) on a fixed canvas.
// y is clamped to [0, max(1, data)] so rate curves keep a stable frame.
std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label,
                      const std::vector<Series>& series,
                      const std::string& stamp);

// Grouped bar chart: one group per category, one bar per series, plus a
// dashed horizontal rule at `threshold` when it is positive.
std::string bar_plot(const std::string& title, const std::string& x_label,
                     const std::string& y_label,
                     const std::vector<std::string>& categories,
                     const std::vector<std::string>& series_labels,
                     const std::vector<std::vector<double>>& values,
                     double threshold, const std::string& stamp);

}  // namespace gridwatch::cli
