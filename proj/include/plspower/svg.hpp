#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "plspower/types.hpp"

namespace plspower {

struct CurvePoint {
  double n = 0;
  double power = 0;
  double stderr_ = 0;
};

struct Curve {
  std::string label;
  std::vector<CurvePoint> points;
};

/// Power-vs-sample-size plot: one polyline per curve with a shaded
/// +/- 1.96 * stderr band. Plain hand-written SVG, no dependencies.
inline void write_power_curve_svg(const std::string& path, const std::vector<Curve>& curves,
                                  const std::string& title = "Estimated power") {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const double width = 720, height = 480;
  const double left = 70, right = 40, top = 50, bottom = 60;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  double n_min = 1e300, n_max = -1e300;
  for (const Curve& c : curves)
    for (const CurvePoint& p : c.points) {
      n_min = std::min(n_min, p.n);
      n_max = std::max(n_max, p.n);
    }
  if (!(n_max > n_min)) {
    n_min -= 1.0;
    n_max += 1.0;
  }

  auto sx = [&](double n) { return left + (n - n_min) / (n_max - n_min) * plot_w; };
  auto sy = [&](double power) {
    double clamped = std::clamp(power, 0.0, 1.0);
    return top + (1.0 - clamped) * plot_h;
  };

  std::ofstream out(path);
  if (!out) fail(errc::invalid_input, "write_power_curve_svg: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" "
      << "font-family=\"sans-serif\">" << title << "</text>\n";

  // axes and grid
  for (int tick = 0; tick <= 10; tick += 2) {
    double y = sy(tick / 10.0);
    out << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w << "\" y2=\""
        << y << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
        << tick / 10.0 << "</text>\n";
  }
  for (const Curve& c : curves) {
    for (const CurvePoint& p : c.points) {
      double x = sx(p.n);
      out << "<text x=\"" << x << "\" y=\"" << top + plot_h + 18
          << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
          << static_cast<long long>(p.n) << "</text>\n";
    }
    break;  // tick labels from the first curve only
  }
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 16
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
      << "observations per class</text>\n";
  out << "<text x=\"18\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
      << "transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\">power</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = palette[c % (sizeof(palette) / sizeof(palette[0]))];
    const auto& pts = curves[c].points;
    if (pts.empty()) continue;

    // confidence band: upper edge left-to-right, lower edge back
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (const CurvePoint& p : pts) out << sx(p.n) << ',' << sy(p.power + 1.96 * p.stderr_) << ' ';
    for (auto it = pts.rbegin(); it != pts.rend(); ++it)
      out << sx(it->n) << ',' << sy(it->power - 1.96 * it->stderr_) << ' ';
    out << "\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const CurvePoint& p : pts) out << sx(p.n) << ',' << sy(p.power) << ' ';
    out << "\"/>\n";
    for (const CurvePoint& p : pts)
      out << "<circle cx=\"" << sx(p.n) << "\" cy=\"" << sy(p.power) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";

    double ly = top + 16 + 16 * static_cast<double>(c);
    out << "<rect x=\"" << left + plot_w - 120 << "\" y=\"" << ly - 9
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << left + plot_w - 102 << "\" y=\"" << ly + 2
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << curves[c].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace plspower
