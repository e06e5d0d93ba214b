#ifndef IAPDA_BENCH_SVG_HPP
#define IAPDA_BENCH_SVG_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace iapda::bench {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Log-log line plot; points with non-positive coordinates are skipped.
inline std::string loglog_svg(const std::string& title, const std::vector<SvgSeries>& series) {
  constexpr double width = 640, height = 420, left = 70, right = 150, top = 40, bottom = 50;
  static const char* const colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (const SvgSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, std::log10(s.x[i]));
      x_hi = std::max(x_hi, std::log10(s.x[i]));
      y_lo = std::min(y_lo, std::log10(s.y[i]));
      y_hi = std::max(y_hi, std::log10(s.y[i]));
    }
  }
  if (!(x_hi >= x_lo)) x_lo = 0, x_hi = 1;
  if (!(y_hi >= y_lo)) y_lo = 0, y_hi = 1;
  x_lo = std::floor(x_lo), x_hi = std::max(std::ceil(x_hi), x_lo + 1);
  y_lo = std::floor(y_lo), y_hi = std::max(std::ceil(y_hi), y_lo + 1);
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double v) { return left + (std::log10(v) - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double v) { return top + (y_hi - std::log10(v)) / (y_hi - y_lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\" font-family=\"sans-serif\">" << title << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = x_lo; e <= x_hi + 0.5; e += 1.0) {
    const double x = left + (e - x_lo) / (x_hi - x_lo) * pw;
    o << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\"" << top + ph
      << "\" stroke=\"#ddd\"/>\n<text x=\"" << x - 10 << "\" y=\"" << top + ph + 18
      << "\" font-size=\"11\" font-family=\"sans-serif\">1e" << e << "</text>\n";
  }
  for (double e = y_lo; e <= y_hi + 0.5; e += 1.0) {
    const double y = top + (y_hi - e) / (y_hi - y_lo) * ph;
    o << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw << "\" y2=\"" << y
      << "\" stroke=\"#ddd\"/>\n<text x=\"" << left - 45 << "\" y=\"" << y + 4
      << "\" font-size=\"11\" font-family=\"sans-serif\">1e" << e << "</text>\n";
  }
  for (std::size_t si = 0; si < series.size(); ++si) {
    const SvgSeries& s = series[si];
    const char* color = colors[si % 6];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    o << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(si + 1);
    o << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n<text x=\"" << left + pw + 35 << "\" y=\"" << ly + 4
      << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline void write_loglog_svg(const std::string& path, const std::string& title, const std::vector<SvgSeries>& series) {
  std::ofstream out(path);
  out << loglog_svg(title, series);
}

}  // namespace iapda::bench

#endif  // IAPDA_BENCH_SVG_HPP
