#include "svg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace scissortruss::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const LinePlot& plot) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < std::min(plot.x.size(), plot.y.size()); ++i) {
    if (std::isfinite(plot.x[i]) && std::isfinite(plot.y[i])) pts.emplace_back(plot.x[i], plot.y[i]);
  }

  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (!pts.empty()) {
    const auto [xmin, xmax] = std::minmax_element(pts.begin(), pts.end());
    x0 = xmin->first;
    x1 = xmax->first;
    const auto [ymin, ymax] = std::minmax_element(
        pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    y0 = std::min(0.0, ymin->second);
    y1 = std::max(0.0, ymax->second);
  }
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  const auto sy = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     kWidth / 2, escape(plot.title));
  svg += fmt::format(
      "<path d=\"M{0} {1} V{2} H{3}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n", kLeft,
      kTop, kTop + ph, kLeft + pw);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2,
                     kHeight - 12, escape(plot.x_label));
  svg += fmt::format(
      "<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
      kTop + ph / 2, escape(plot.y_label));
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{:.4g}</text>\n", kLeft,
                     kTop + ph + 16, x0);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{:.4g}</text>\n", kLeft + pw,
                     kTop + ph + 16, x1);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.4g}</text>\n", kLeft - 6,
                     kTop + ph, y0);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.4g}</text>\n", kLeft - 6,
                     kTop + 4, y1);

  if (pts.empty()) {
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">no samples</text>\n",
                       kLeft + pw / 2, kTop + ph / 2);
  } else {
    svg += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) svg.push_back(' ');
      svg += fmt::format("{:.2f},{:.2f}", sx(pts[i].first), sy(pts[i].second));
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace scissortruss::cli
