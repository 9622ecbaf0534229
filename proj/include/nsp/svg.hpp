#pragma once

// Minimal SVG writers for the demo figures.

#include <string>
#include <vector>

#include "nsp/geometry.hpp"

namespace nsp::svg {

struct CurveOverlay {
  std::string title;
  PlanarCurve fine;                ///< drawn as red points joined by a polyline
  std::vector<Point2> coarse;      ///< drawn as black squares
  bool reference_circle = true;    ///< blue circle of radius R about center
  double R = 1.0;
  Point2 center = Point2::Zero();
  std::vector<Index> highlight;    ///< fine indices drawn larger, in orange
};

std::string curve_overlay(const CurveOverlay& fig);

struct Series {
  std::string name;
  std::vector<double> values;
};

/// Grouped bars: one group per category, one bar per series.
std::string bar_chart(const std::string& title, const std::vector<std::string>& categories,
                      const std::vector<Series>& series, bool log_scale = false);

/// Lines over x = 1..n on a log10 y axis; nonpositive values are clamped to
/// the smallest positive value present.
std::string log_line_plot(const std::string& title, const std::string& x_label,
                          const std::vector<Series>& series);

}  // namespace nsp::svg
