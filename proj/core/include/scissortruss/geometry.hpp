#pragma once

#include <array>
#include <span>
#include <vector>

namespace scissortruss {

/// Deployed scissor angle of the baseline unit, degrees.
inline constexpr double kDeployedAngleDeg = 80.0;
/// Stowed scissor angle of the baseline unit, degrees.
inline constexpr double kStowedAngleDeg = 12.54;
/// Unit height fed to the link-length chain for the 25 m / 12-unit baseline.
inline constexpr double kEqChainHeight = 5.09;

/// Baseline row (25 m aperture, 12 units) that every metrics row is scaled from.
struct BaselineRow {
  double aperture = 25.0;
  int unit_count = 12;
  double stretched_length = 6.470;
  double deployed_height = 5.122;
  double stowed_height_with_links = 11.010;
  double stowed_height_without_links = 6.697;
  double stowed_diameter = 3.246;
};

inline constexpr BaselineRow kBaseline{};

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Geometry of one triple-scissor modular unit.
///
/// Link groups share one length each: L1 = L2 (main diagonals), L3..L6
/// (horizontal links), L7..L10 (half diagonals), L11..L14 (quarter diagonals).
struct UnitGeometry {
  std::array<double, 14> lengths{};
  double deployed_angle_deg = kDeployedAngleDeg;
  double stowed_angle_deg = kStowedAngleDeg;
  double deployed_height = 0.0;
  double stretched_length = 0.0;

  double main_diagonal() const { return lengths[0]; }
  double horizontal() const { return lengths[2]; }
  double half_diagonal() const { return lengths[6]; }
  double quarter_diagonal() const { return lengths[10]; }
  double deployed_angle_rad() const;
  double stowed_angle_rad() const;
  double total_link_length() const;
};

struct AntennaDesign {
  double aperture = 0.0;
  int unit_count = 0;
  bool with_links = true;
  UnitGeometry unit;
};

/// One row of the design-parameter tables.
struct DesignMetrics {
  double aperture = 0.0;
  int unit_count = 0;
  bool with_links = true;
  double stretched_length = 0.0;
  double deployed_height = 0.0;
  double stowed_height = 0.0;
  double deployed_diameter = 0.0;
  double stowed_diameter = 0.0;
  double deployed_volume = 0.0;
  double stowed_volume = 0.0;
  double sr_diameter = 0.0;
  double sr_height = 0.0;
  double sr_volume = 0.0;
  // Set when unit_count differs from the baseline row and the stow
  // coefficients are extrapolated.
  bool extrapolated = false;
};

/// Chord spanned by one unit on a ring of diameter `aperture` split into
/// `unit_count` units: D sin(pi/N).
double stretched_length(double aperture, int unit_count);

/// Link lengths from deployed height and scissor angles. Throws
/// std::domain_error outside 0 < stowed < deployed < 180 or for height <= 0.
/// Without an explicit stretched length the baseline width/height ratio is used.
UnitGeometry synthesize_unit(double deployed_height, double deployed_angle_deg,
                             double stowed_angle_deg);
UnitGeometry synthesize_unit(double deployed_height, double deployed_angle_deg,
                             double stowed_angle_deg, double stretched);

/// Vertical span of a crossed pair of links of length `link_length` opened to
/// `angle_deg` (law of cosines): L sqrt(2 (1 + cos theta)).
double scissor_span(double link_length, double angle_deg);

/// Area of a regular polygon with `sides` sides and circumradius `radius`.
double regular_polygon_area(int sides, double radius);

DesignMetrics design_metrics(double aperture, int unit_count, bool with_links);

std::vector<DesignMetrics> table_row_set(std::span<const double> apertures, int unit_count,
                                         bool with_links);

/// Full antenna: unit synthesized from the link-length chain height scaled to
/// the requested stretched length.
AntennaDesign make_design(double aperture, int unit_count, bool with_links,
                          double deployed_angle_deg = kDeployedAngleDeg,
                          double stowed_angle_deg = kStowedAngleDeg);

}  // namespace scissortruss
