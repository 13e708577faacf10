#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "collapse/csv.hpp"
#include "collapse/errors.hpp"

namespace collapse {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[i % 6];
}

}  // namespace detail

/// Static SVG 1.1 line plot, 800x600, one polyline per series, linear axes
/// with five labelled ticks each. No external plotting dependency; output is
/// byte-deterministic for identical input.
inline void write_svg_plot(std::ostream& sink, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotSeries>& series) {
  constexpr double width = 800, height = 600;
  constexpr double ml = 70, mr = 25, mt = 40, mb = 55;  // margins

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("write_svg_plot: series length mismatch");
    for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
  }
  if (!std::isfinite(xmin) || !std::isfinite(ymin))
    throw std::invalid_argument("write_svg_plot: no data");
  if (xmax == xmin) { xmax += 1.0; xmin -= 1.0; }
  if (ymax == ymin) { ymax += 1.0; ymin -= 1.0; }

  const auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  const auto py = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  sink << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
          "width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
       << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
       << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"16\">"
       << title << "</text>\n";

  // axes
  sink << "<line x1=\"" << format_double(ml) << "\" y1=\"" << format_double(mt)
       << "\" x2=\"" << format_double(ml) << "\" y2=\""
       << format_double(height - mb) << "\" stroke=\"black\"/>\n";
  sink << "<line x1=\"" << format_double(ml) << "\" y1=\""
       << format_double(height - mb) << "\" x2=\"" << format_double(width - mr)
       << "\" y2=\"" << format_double(height - mb) << "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    sink << "<line x1=\"" << format_double(px(fx)) << "\" y1=\""
         << format_double(height - mb) << "\" x2=\"" << format_double(px(fx))
         << "\" y2=\"" << format_double(height - mb + 5)
         << "\" stroke=\"black\"/>\n"
         << "<text x=\"" << format_double(px(fx)) << "\" y=\""
         << format_double(height - mb + 20)
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            "font-size=\"11\">"
         << format_double(fx) << "</text>\n";
    sink << "<line x1=\"" << format_double(ml - 5) << "\" y1=\""
         << format_double(py(fy)) << "\" x2=\"" << format_double(ml)
         << "\" y2=\"" << format_double(py(fy)) << "\" stroke=\"black\"/>\n"
         << "<text x=\"" << format_double(ml - 8) << "\" y=\""
         << format_double(py(fy) + 4)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
            "font-size=\"11\">"
         << format_double(fy) << "</text>\n";
  }
  sink << "<text x=\"" << format_double((ml + width - mr) / 2) << "\" y=\""
       << format_double(height - 12)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"13\">"
       << xlabel << "</text>\n";
  sink << "<text x=\"18\" y=\"" << format_double((mt + height - mb) / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"13\" transform=\"rotate(-90 18 "
       << format_double((mt + height - mb) / 2) << ")\">" << ylabel
       << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    sink << "<polyline fill=\"none\" stroke=\"" << detail::series_color(s)
         << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (i) sink << ' ';
      sink << format_double(px(series[s].x[i])) << ','
           << format_double(py(series[s].y[i]));
    }
    sink << "\"/>\n";
    sink << "<text x=\"" << format_double(width - mr - 6) << "\" y=\""
         << format_double(mt + 16.0 * static_cast<double>(s) + 12)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
            "font-size=\"12\" fill=\""
         << detail::series_color(s) << "\">" << series[s].label << "</text>\n";
  }
  sink << "</svg>\n";
  if (!sink) throw IoFailure("write_svg_plot: sink in failed state");
}

inline void write_svg_file(const std::string& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotSeries>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("write_svg_file: cannot open " + path);
  write_svg_plot(out, title, xlabel, ylabel, series);
  out.flush();
  if (!out) throw IoFailure("write_svg_file: write failed for " + path);
}

}  // namespace collapse
