#include "scissortruss/geometry.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace scissortruss {

namespace {

void check_angles(double deployed_deg, double stowed_deg) {
  if (!(stowed_deg > 0.0 && stowed_deg < deployed_deg && deployed_deg < 180.0)) {
    throw std::domain_error(fmt::format(
        "scissor angles must satisfy 0 < stowed ({:g}) < deployed ({:g}) < 180 degrees",
        stowed_deg, deployed_deg));
  }
}

// Baseline coefficients are expressed per metre of stretched length, so an
// N != 12 ring reuses them through its own chord.
double per_chord(double value) {
  return value / stretched_length(kBaseline.aperture, kBaseline.unit_count);
}

}  // namespace

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

double UnitGeometry::deployed_angle_rad() const { return deg_to_rad(deployed_angle_deg); }
double UnitGeometry::stowed_angle_rad() const { return deg_to_rad(stowed_angle_deg); }

double UnitGeometry::total_link_length() const {
  return std::accumulate(lengths.begin(), lengths.end(), 0.0);
}

double stretched_length(double aperture, int unit_count) {
  if (!(aperture > 0.0)) throw std::domain_error("aperture must be positive");
  if (unit_count < 2) throw std::domain_error("unit count must be at least 2");
  return aperture * std::sin(std::numbers::pi / unit_count);
}

UnitGeometry synthesize_unit(double deployed_height, double deployed_angle_deg,
                             double stowed_angle_deg) {
  const double aspect = stretched_length(kBaseline.aperture, kBaseline.unit_count) / kEqChainHeight;
  return synthesize_unit(deployed_height, deployed_angle_deg, stowed_angle_deg,
                         deployed_height * aspect);
}

UnitGeometry synthesize_unit(double deployed_height, double deployed_angle_deg,
                             double stowed_angle_deg, double stretched) {
  if (!(deployed_height > 0.0)) throw std::domain_error("deployed height must be positive");
  if (!(stretched > 0.0)) throw std::domain_error("stretched length must be positive");
  check_angles(deployed_angle_deg, stowed_angle_deg);

  const double half = deg_to_rad(deployed_angle_deg) / 2.0;
  const double main = deployed_height / std::cos(half);
  const double horizontal = deployed_height / 2.0 * std::tan(half);
  const double half_diag = main / 2.0;
  const double quarter_diag = half_diag / 2.0;

  UnitGeometry unit;
  unit.lengths = {main,      main,      horizontal, horizontal, horizontal,
                  horizontal, half_diag, half_diag,  half_diag,  half_diag,
                  quarter_diag, quarter_diag, quarter_diag, quarter_diag};
  unit.deployed_angle_deg = deployed_angle_deg;
  unit.stowed_angle_deg = stowed_angle_deg;
  unit.deployed_height = deployed_height;
  unit.stretched_length = stretched;
  return unit;
}

double scissor_span(double link_length, double angle_deg) {
  if (!(link_length > 0.0)) throw std::domain_error("link length must be positive");
  if (angle_deg < 0.0 || angle_deg > 180.0) {
    throw std::domain_error("scissor angle must lie in [0, 180] degrees");
  }
  // 2 L cos(theta/2) is the same quantity without the cancellation near 180.
  return 2.0 * link_length * std::cos(deg_to_rad(angle_deg) / 2.0);
}

double regular_polygon_area(int sides, double radius) {
  if (sides < 3) throw std::domain_error("polygon needs at least 3 sides");
  return 0.5 * sides * radius * radius * std::sin(2.0 * std::numbers::pi / sides);
}

DesignMetrics design_metrics(double aperture, int unit_count, bool with_links) {
  if (!(aperture > 0.0)) throw std::domain_error("aperture must be positive");
  if (unit_count < 3) throw std::domain_error("design metrics need at least 3 units");

  DesignMetrics m;
  m.aperture = aperture;
  m.unit_count = unit_count;
  m.with_links = with_links;
  m.extrapolated = unit_count != kBaseline.unit_count;

  const double chord = stretched_length(aperture, unit_count);
  m.stretched_length = chord;
  m.deployed_height = per_chord(kBaseline.deployed_height) * chord;
  m.stowed_height = per_chord(with_links ? kBaseline.stowed_height_with_links
                                         : kBaseline.stowed_height_without_links) *
                    chord;
  m.deployed_diameter = aperture;
  m.stowed_diameter = per_chord(kBaseline.stowed_diameter) * chord;
  m.deployed_volume =
      regular_polygon_area(unit_count, m.deployed_diameter / 2.0) * m.deployed_height;
  m.stowed_volume = regular_polygon_area(unit_count, m.stowed_diameter / 2.0) * m.stowed_height;
  m.sr_diameter = m.deployed_diameter / m.stowed_diameter;
  m.sr_height = m.deployed_height / m.stowed_height;
  m.sr_volume = m.deployed_volume / m.stowed_volume;
  return m;
}

std::vector<DesignMetrics> table_row_set(std::span<const double> apertures, int unit_count,
                                         bool with_links) {
  std::vector<DesignMetrics> rows;
  rows.reserve(apertures.size());
  for (double d : apertures) rows.push_back(design_metrics(d, unit_count, with_links));
  return rows;
}

AntennaDesign make_design(double aperture, int unit_count, bool with_links,
                          double deployed_angle_deg, double stowed_angle_deg) {
  if (unit_count < 3) throw std::domain_error("an antenna ring needs at least 3 units");
  const double chord = stretched_length(aperture, unit_count);
  const double height = kEqChainHeight * chord /
                        stretched_length(kBaseline.aperture, kBaseline.unit_count);
  AntennaDesign design;
  design.aperture = aperture;
  design.unit_count = unit_count;
  design.with_links = with_links;
  design.unit = synthesize_unit(height, deployed_angle_deg, stowed_angle_deg, chord);
  return design;
}

}  // namespace scissortruss
