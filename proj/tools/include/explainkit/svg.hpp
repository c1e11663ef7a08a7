#pragma once

#include <string>
#include <vector>

namespace explainkit {

struct SvgSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string color = "steelblue";
  double stroke_width = 1.0;
};

// Minimal diagnostic charts: polylines, circles, text labels. No timestamps
// or other non-reproducible metadata.
std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& title,
                           int width = 720, int height = 480);

std::string svg_bar_chart(const std::vector<std::string>& labels,
                          const std::vector<double>& values, const std::string& title,
                          int width = 720, int height = 480);

}  // namespace explainkit
