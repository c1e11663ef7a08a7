#include "explainkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace explainkit {

namespace {

constexpr int kMargin = 50;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span() const { return hi > lo ? hi - lo : 1.0; }
};

}  // namespace

std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& title,
                           int width, int height) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.xs) xr.add(v);
    for (double v : s.ys) yr.add(v);
  }
  const double px = width - 2 * kMargin, py = height - 2 * kMargin;
  auto sx = [&](double v) { return kMargin + (v - xr.lo) / xr.span() * px; };
  auto sy = [&](double v) { return height - kMargin - (v - yr.lo) / yr.span() * py; };

  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
      << "</text>\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << px
      << "\" height=\"" << py << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << height - kMargin + 16 << "\">" << xr.lo
      << "</text>\n";
  out << "<text x=\"" << width - kMargin << "\" y=\"" << height - kMargin + 16
      << "\" text-anchor=\"end\">" << xr.hi << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << height - kMargin
      << "\" text-anchor=\"end\">" << yr.lo << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin
      << "\" text-anchor=\"end\">" << yr.hi << "</text>\n";

  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
        << s.stroke_width << "\" points=\"";
    for (std::size_t i = 0; i < s.xs.size(); ++i)
      out << sx(s.xs[i]) << ',' << sy(s.ys[i]) << ' ';
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_bar_chart(const std::vector<std::string>& labels,
                          const std::vector<double>& values, const std::string& title,
                          int width, int height) {
  Range vr;
  vr.add(0.0);
  for (double v : values) vr.add(v);
  const double px = width - 2 * kMargin;
  const double row_h = (height - 2.0 * kMargin) / std::max<std::size_t>(1, values.size());

  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
      << "</text>\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = kMargin + static_cast<double>(i) * row_h;
    const double w = (values[i] - vr.lo) / vr.span() * px;
    out << "<rect x=\"" << kMargin << "\" y=\"" << y << "\" width=\"" << w << "\" height=\""
        << row_h * 0.8 << "\" fill=\"steelblue\"/>\n";
    out << "<text x=\"" << kMargin + 2 << "\" y=\"" << y + row_h * 0.6 << "\" font-size=\"11\">"
        << labels[i] << " (" << values[i] << ")</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace explainkit
