#include "nmrqec/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nmrqec {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_svg_plot(const std::string& title,
                            const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<SvgSeries>& series) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min, y_min = x_min, y_max = -x_min;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  if (!(x_min <= x_max) || !(y_min <= y_max))
    throw std::invalid_argument("svg plot: no data points");
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  double plot_w = kWidth - kMarginLeft - kMarginRight;
  double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) {
    return kMarginLeft + plot_w * (x - x_min) / (x_max - x_min);
  };
  auto py = [&](double y) {
    return kMarginTop + plot_h * (1.0 - (y - y_min) / (y_max - y_min));
  };

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
      << "' height='" << kHeight << "' viewBox='0 0 " << kWidth << ' '
      << kHeight << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << kWidth / 2 << "' y='22' text-anchor='middle' "
         "font-family='sans-serif' font-size='15'>"
      << title << "</text>\n";

  // Frame and ticks.
  out << "<rect x='" << kMarginLeft << "' y='" << kMarginTop << "' width='"
      << plot_w << "' height='" << plot_h
      << "' fill='none' stroke='black' stroke-width='1'/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    double fx = x_min + (x_max - x_min) * i / ticks;
    double fy = y_min + (y_max - y_min) * i / ticks;
    out << "<line x1='" << px(fx) << "' y1='" << kMarginTop + plot_h
        << "' x2='" << px(fx) << "' y2='" << kMarginTop + plot_h + 5
        << "' stroke='black'/>\n"
        << "<text x='" << px(fx) << "' y='" << kMarginTop + plot_h + 20
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
        << num(fx) << "</text>\n"
        << "<line x1='" << kMarginLeft - 5 << "' y1='" << py(fy) << "' x2='"
        << kMarginLeft << "' y2='" << py(fy) << "' stroke='black'/>\n"
        << "<text x='" << kMarginLeft - 9 << "' y='" << py(fy) + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
        << num(fy) << "</text>\n";
  }
  out << "<text x='" << kMarginLeft + plot_w / 2 << "' y='" << kHeight - 12
      << "' text-anchor='middle' font-family='sans-serif' font-size='13'>"
      << x_label << "</text>\n"
      << "<text x='18' y='" << kMarginTop + plot_h / 2
      << "' text-anchor='middle' font-family='sans-serif' font-size='13' "
         "transform='rotate(-90 18 "
      << kMarginTop + plot_h / 2 << ")'>" << y_label << "</text>\n";

  // Series and legend.
  double legend_y = kMarginTop + 10.0;
  for (const auto& s : series) {
    out << "<polyline fill='none' stroke='" << s.color
        << "' stroke-width='1.6'";
    if (s.dashed) out << " stroke-dasharray='6 4'";
    out << " points='";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    out << "'/>\n";
    double lx = kWidth - kMarginRight + 12.0;
    out << "<line x1='" << lx << "' y1='" << legend_y << "' x2='" << lx + 24
        << "' y2='" << legend_y << "' stroke='" << s.color
        << "' stroke-width='1.6'";
    if (s.dashed) out << " stroke-dasharray='6 4'";
    out << "/>\n<text x='" << lx + 30 << "' y='" << legend_y + 4
        << "' font-family='sans-serif' font-size='11'>" << s.label
        << "</text>\n";
    legend_y += 18.0;
  }
  out << "</svg>\n";
  return out.str();
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<SvgSeries>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot file: " + path);
  out << render_svg_plot(title, x_label, y_label, series);
}

}  // namespace nmrqec
