#pragma once

#include <string>
#include <vector>

namespace scissortruss::cli {

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG document with axes, extreme-value tick labels and one
/// polyline. Non-finite samples are skipped.
std::string render_svg(const LinePlot& plot);

}  // namespace scissortruss::cli
