#include "pinnss/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pinnss {

namespace {

struct Rect {
  double x0, y0, x1, y1;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round axis bounds outward to "nice" tick positions.
std::vector<double> linear_ticks(double lo, double hi) {
  double span = hi - lo;
  if (!(span > 0)) return {lo};
  double raw = span / 5.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0})
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 0.5 * step; v += step)
    ticks.push_back(v);
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  for (int e = static_cast<int>(std::floor(lo)); e <= static_cast<int>(std::ceil(hi)); ++e)
    if (e >= lo - 1e-9 && e <= hi + 1e-9) ticks.push_back(e);
  return ticks;
}

std::string tick_label(double v, bool log_axis) {
  std::ostringstream s;
  if (log_axis) {
    s << "1e" << static_cast<int>(std::lround(v));
  } else {
    s.precision(4);
    s << v;
  }
  return s.str();
}

} // namespace

void write_svg_chart(const SvgChart& chart, const std::string& path) {
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : chart.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      double y = s.y[i];
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
      if (chart.log_y) {
        if (!(y > 0)) continue;
        y = std::log10(y);
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (!(x_min <= x_max)) throw std::runtime_error("write_svg_chart: no plottable data");
  if (x_min == x_max) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_min == y_max) {
    y_min -= 0.5;
    y_max += 0.5;
  }

  const Rect plot{64, 40, chart.width - 16.0, chart.height - 48.0};
  auto px = [&](double x) {
    return plot.x0 + (x - x_min) / (x_max - x_min) * (plot.x1 - plot.x0);
  };
  auto py = [&](double y) {
    if (chart.log_y) y = std::log10(y);
    return plot.y1 - (y - y_min) / (y_max - y_min) * (plot.y1 - plot.y0);
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\""
      << chart.height << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << fmt(plot.x0) << "\" y=\"" << fmt(plot.y0) << "\" width=\""
      << fmt(plot.x1 - plot.x0) << "\" height=\"" << fmt(plot.y1 - plot.y0)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  if (!chart.title.empty())
    out << "<text x=\"" << fmt((plot.x0 + plot.x1) / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << escape(chart.title) << "</text>\n";

  for (double t : linear_ticks(x_min, x_max)) {
    double x = px(t);
    out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(plot.y1) << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << fmt(plot.y1 + 4) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(plot.y1 + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t, false) << "</text>\n";
  }
  auto y_ticks = chart.log_y ? log_ticks(y_min, y_max) : linear_ticks(y_min, y_max);
  for (double t : y_ticks) {
    double y = plot.y1 - (t - y_min) / (y_max - y_min) * (plot.y1 - plot.y0);
    out << "<line x1=\"" << fmt(plot.x0 - 4) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(plot.x0)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << fmt(plot.x0 - 8) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t, chart.log_y) << "</text>\n";
  }
  if (!chart.x_label.empty())
    out << "<text x=\"" << fmt((plot.x0 + plot.x1) / 2) << "\" y=\"" << fmt(chart.height - 8.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape(chart.x_label) << "</text>\n";
  if (!chart.y_label.empty())
    out << "<text x=\"14\" y=\"" << fmt((plot.y0 + plot.y1) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 14 " << fmt((plot.y0 + plot.y1) / 2) << ")\">"
        << escape(chart.y_label) << "</text>\n";

  double legend_y = plot.y0 + 14;
  for (const auto& s : chart.series) {
    if (s.scatter) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        if (chart.log_y && !(s.y[i] > 0)) continue;
        out << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
            << "\" r=\"1.6\" fill=\"" << s.color << "\"/>\n";
      }
    } else {
      std::ostringstream pointstr;
      bool open = false;
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        bool ok = std::isfinite(s.x[i]) && std::isfinite(s.y[i]) &&
                  (!chart.log_y || s.y[i] > 0);
        if (!ok) { // break the polyline across gaps
          if (open)
            out << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.4\" points=\"" << pointstr.str() << "\"/>\n";
          pointstr.str("");
          open = false;
          continue;
        }
        pointstr << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
        open = true;
      }
      if (open)
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.4\" points=\"" << pointstr.str() << "\"/>\n";
    }
    if (!s.label.empty()) {
      out << "<rect x=\"" << fmt(plot.x1 - 150) << "\" y=\"" << fmt(legend_y - 9)
          << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n";
      out << "<text x=\"" << fmt(plot.x1 - 134) << "\" y=\"" << fmt(legend_y + 2)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
      legend_y += 16;
    }
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace pinnss
