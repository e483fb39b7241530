#include "sarah/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sarah/errors.hpp"

namespace sarah {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1, 2 or 5 times a power of ten, giving at most ~8 ticks over span.
double tick_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 8.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0}) {
    if (f * mag >= raw) return f * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string render_svg(const std::vector<TraceSeries>& series, const PlotOptions& options) {
  if (series.empty()) throw ConfigError("nothing to plot");
  double x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  bool first = true;
  std::vector<std::vector<double>> ys;
  for (const auto& s : series) {
    if (s.epoch.size() != s.subopt.size()) throw DataError(s.label + ": ragged series");
    std::vector<double> y;
    for (std::size_t k = 0; k < s.epoch.size(); ++k) {
      const double v = std::log10(std::max(s.subopt[k], options.floor));
      y.push_back(v);
      x_max = std::max(x_max, s.epoch[k]);
      if (first) {
        y_min = y_max = v;
        first = false;
      }
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
    ys.push_back(std::move(y));
  }
  y_min = std::floor(y_min);
  y_max = std::ceil(y_max);
  if (y_max <= y_min) y_max = y_min + 1.0;
  if (!(x_max > 0.0)) x_max = 1.0;

  const double left = 70, right = 170, top = 40, bottom = 50;
  const double pw = options.width - left - right;
  const double ph = options.height - top - bottom;
  auto px = [&](double x) { return left + pw * x / x_max; };
  auto py = [&](double y) { return top + ph * (y_max - y) / (y_max - y_min); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(options.title) << "</text>\n";
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double xs = tick_step(x_max);
  for (int k = 0; k * xs <= x_max * (1 + 1e-12); ++k) {
    const double x = px(k * xs);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%g", k * xs);
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18)
        << "\" text-anchor=\"middle\">" << label << "</text>\n";
  }
  const double ystep = std::max(1.0, std::ceil(tick_step(y_max - y_min)));
  for (double y = y_min; y <= y_max + 1e-9; y += ystep) {
    const double yy = py(y);
    svg << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(yy) << "\" x2=\"" << num(left + pw)
        << "\" y2=\"" << num(yy) << "\" stroke=\"#dddddd\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%g", y);
    svg << "<text x=\"" << num(left - 8) << "\" y=\"" << num(yy + 4) << "\" text-anchor=\"end\">"
        << label << "</text>\n";
  }
  svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(options.height - 12)
      << "\" text-anchor=\"middle\">epochs</text>\n";
  svg << "<text transform=\"translate(18," << num(top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">log10(F(w) - F(w*))</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < ys[k].size(); ++j) {
      if (j > 0) svg << ' ';
      svg << num(px(series[k].epoch[j])) << ',' << num(py(ys[k][j]));
    }
    svg << "\"/>\n";
    const double ly = top + 14 + 18 * static_cast<double>(k);
    svg << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(left + pw + 36) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(ly + 4) << "\">"
        << escape(series[k].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace sarah
