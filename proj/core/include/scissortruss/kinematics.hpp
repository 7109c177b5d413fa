#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scissortruss/geometry.hpp"

namespace scissortruss {

using Vec2 = Eigen::Vector2d;

// ---------------------------------------------------------------------------
// Mobility
// ---------------------------------------------------------------------------

struct LinkageCount {
  int links = 0;
  int lower_pairs = 0;
  int higher_pairs = 0;
};

/// Planar Gruebler count M = 3(n - 1) - 2 jp - jh. May be <= 0 for
/// overconstrained structures. Throws std::domain_error when n < 2 or a joint
/// count is negative.
int gruebler_mobility(const LinkageCount& count);

/// Link/joint counts quoted for the truss, and the mobility claimed for them.
inline constexpr LinkageCount kTrussLinkageCount{18, 26, 0};
inline constexpr int kTrussClaimedMobility = 1;

struct MobilityReport {
  LinkageCount count;
  int mobility = 0;
  std::optional<int> claimed;
  std::vector<std::string> warnings;
};

/// Evaluates the count and compares it against a claimed value, if any.
MobilityReport mobility_report(const LinkageCount& count, std::optional<int> claimed = {});

// ---------------------------------------------------------------------------
// Planar unit model
// ---------------------------------------------------------------------------
//
// Unit frame: origin O at the base midpoint, x along the chord, y up. Every
// diagonal sits at +/- theta/2 from vertical. Points in chain order:
//
//   O  base midpoint (fixed)            G  bottom-left corner   (L8 from D)
//   A  bottom-right corner, slider      H  top-right corner     (L1 from B)
//   B  central scissor pivot (L2)       I  right outer joint    (L9 from H)
//   C  top-left corner       (L2)       J  right upper tip      (L13 from I)
//   D  left outer joint      (L7)       K  right lower tip      (L14 from I)
//   E  left upper tip        (L11)      T  top midpoint, slider on top chord
//   F  left lower tip        (L12)
//
// Each point records its parent; V = V_parent + V_rel and likewise for A.

enum class JointKind { kFixed, kRevolute, kPrismatic };

struct PointState {
  char label = 'O';
  int parent = -1;
  JointKind joint = JointKind::kFixed;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 acceleration = Vec2::Zero();
  // Relative motion with respect to the parent point.
  double link_rate = 0.0;  // angular rate of the connecting link, rad/s
  double link_accel = 0.0;  // angular acceleration of the connecting link, rad/s^2
  Vec2 rel_velocity = Vec2::Zero();
  Vec2 rel_normal = Vec2::Zero();
  Vec2 rel_tangential = Vec2::Zero();
  // Intrinsic split of the absolute acceleration along/normal to the path.
  Vec2 accel_normal = Vec2::Zero();
  Vec2 accel_tangential = Vec2::Zero();
};

struct KinematicState {
  double theta = 0.0;
  double theta_dot = 0.0;
  double theta_ddot = 0.0;
  double slider_speed = 0.0;
  std::vector<PointState> points;
  bool positions_solved = false;
  bool velocities_solved = false;
  bool accelerations_solved = false;

  const PointState& point(char label) const;
};

/// Planar positions of all pivots at scissor angle `theta` (radians). Throws
/// std::out_of_range when theta lies outside [stowed, deployed].
KinematicState solve_positions(const UnitGeometry& unit, double theta);

/// Vertical extent of the unit at `theta`.
double unit_height(const UnitGeometry& unit, double theta);
/// Horizontal extent (outer tip to outer tip) at `theta`.
double unit_width(const UnitGeometry& unit, double theta);

/// Slider travel of point A from the origin, and its derivatives in theta.
double slider_travel(const UnitGeometry& unit, double theta);
double slider_travel_rate(const UnitGeometry& unit, double theta);

/// Speed of a point at radius r on a link turning at omega.
double tangential_speed(double radius, double omega);
/// Centripetal component v^2 / r. Throws std::domain_error when r == 0.
double normal_acceleration(double speed, double radius);

/// Sets theta_dot from the slider speed and propagates velocities O -> A -> ...
/// Throws std::logic_error if positions were not solved.
KinematicState chain_velocities(const UnitGeometry& unit, KinematicState state);

/// Sets theta_ddot for a constant slider speed and propagates accelerations.
/// Throws std::logic_error if velocities were not computed.
KinematicState chain_accelerations(const UnitGeometry& unit, KinematicState state);

/// Positions, velocities and accelerations at one angle for a given slider speed.
KinematicState solve_state(const UnitGeometry& unit, double theta, double slider_speed);

// ---------------------------------------------------------------------------
// Deployment profile
// ---------------------------------------------------------------------------

enum class DeployDirection { kDeploy, kStow, kFullCycle };

struct DeploymentProfile {
  std::vector<double> time;
  std::vector<double> theta;
  std::vector<KinematicState> states;
  double total_duration = 0.0;
};

/// Integrates theta(t) under a constant slider speed (RK4) between the stowed
/// and deployed angles. `steps` is the number of integration steps per leg;
/// zero yields an empty profile. Throws std::domain_error for speed <= 0.
DeploymentProfile deployment_profile(const UnitGeometry& unit, double slider_speed,
                                     DeployDirection direction, int steps = 200);

/// Closed-form duration of one leg (stowed to deployed) at the given speed.
double deployment_duration(const UnitGeometry& unit, double slider_speed);

/// The four curves plotted for the deployment: tracked-point speed and
/// acceleration magnitude, main-diagonal angular rate and acceleration.
struct KinematicCurves {
  std::vector<double> time;
  std::vector<double> linear_velocity;
  std::vector<double> angular_velocity;
  std::vector<double> linear_acceleration;
  std::vector<double> angular_acceleration;
};

KinematicCurves kinematic_curves(const DeploymentProfile& profile, char tracked_point = 'C');

}  // namespace scissortruss
