#pragma once

#include <string>
#include <vector>

#include "sarah/trace_io.hpp"

namespace sarah {

struct PlotOptions {
  std::string title = "log10 suboptimality";
  int width = 720;
  int height = 480;
  // log10 is taken of max(subopt, floor).
  double floor = 1e-16;
};

// Line chart of log10(subopt) against epoch, one polyline per series and a
// legend with the series labels. Output depends only on the inputs.
std::string render_svg(const std::vector<TraceSeries>& series, const PlotOptions& options = {});

}  // namespace sarah
