#pragma once

#include <string>
#include <vector>

namespace pinnss {

/// One polyline or scatter series on a chart.
struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  bool scatter = false; // draw dots instead of a connected line
  std::vector<double> x, y;
};

struct SvgChart {
  std::string title;
  std::string x_label, y_label;
  bool log_y = false; // non-positive y values are dropped in log mode
  int width = 720, height = 440;
  std::vector<SvgSeries> series;
};

/// Writes a self-contained SVG file; throws std::runtime_error on I/O failure
/// or if no finite data point remains after filtering.
void write_svg_chart(const SvgChart& chart, const std::string& path);

} // namespace pinnss
