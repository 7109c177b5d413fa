#include "scissortruss/kinematics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace scissortruss {

int gruebler_mobility(const LinkageCount& count) {
  if (count.links < 2) throw std::domain_error("a linkage needs at least 2 links");
  if (count.lower_pairs < 0 || count.higher_pairs < 0) {
    throw std::domain_error("joint counts must be non-negative");
  }
  return 3 * (count.links - 1) - 2 * count.lower_pairs - count.higher_pairs;
}

MobilityReport mobility_report(const LinkageCount& count, std::optional<int> claimed) {
  MobilityReport report;
  report.count = count;
  report.mobility = gruebler_mobility(count);
  report.claimed = claimed;
  if (claimed && *claimed != report.mobility) {
    report.warnings.push_back("claimed mobility " + std::to_string(*claimed) + " for (n=" +
                              std::to_string(count.links) + ", jp=" +
                              std::to_string(count.lower_pairs) + ", jh=" +
                              std::to_string(count.higher_pairs) + ") but 3(n-1) - 2jp - jh = " +
                              std::to_string(3 * (count.links - 1)) + " - " +
                              std::to_string(2 * count.lower_pairs + count.higher_pairs) + " = " +
                              std::to_string(report.mobility));
  }
  if (report.mobility <= 0) {
    report.warnings.push_back("mobility " + std::to_string(report.mobility) +
                              " <= 0: the counted linkage is a structure, not a mechanism");
  }
  return report;
}

namespace {

struct Member {
  char label;
  int parent;
  JointKind kind;
  int link;        // index into UnitGeometry::lengths
  double divisor;  // member length = lengths[link] / divisor
  double phi0;     // revolute: link angle = phi0 + kappa * theta
  double kappa;
  double ux;  // prismatic: slide direction
  double uy;
};

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Chain order: parents always precede children.
constexpr std::array<Member, 13> kMembers{{
    {'O', -1, JointKind::kFixed, 0, 1.0, 0.0, 0.0, 0.0, 0.0},
    {'A', 0, JointKind::kPrismatic, 1, 2.0, 0.0, 0.0, 1.0, 0.0},
    {'B', 1, JointKind::kRevolute, 1, 2.0, kHalfPi, 0.5, 0.0, 0.0},
    {'C', 2, JointKind::kRevolute, 1, 2.0, kHalfPi, 0.5, 0.0, 0.0},
    {'D', 3, JointKind::kRevolute, 6, 1.0, -kHalfPi, -0.5, 0.0, 0.0},
    {'E', 4, JointKind::kRevolute, 10, 1.0, kHalfPi, 0.5, 0.0, 0.0},
    {'F', 4, JointKind::kRevolute, 11, 1.0, -kHalfPi, -0.5, 0.0, 0.0},
    {'G', 4, JointKind::kRevolute, 7, 1.0, -kHalfPi, 0.5, 0.0, 0.0},
    {'H', 2, JointKind::kRevolute, 0, 2.0, kHalfPi, -0.5, 0.0, 0.0},
    {'I', 8, JointKind::kRevolute, 8, 1.0, -kHalfPi, 0.5, 0.0, 0.0},
    {'J', 9, JointKind::kRevolute, 12, 1.0, kHalfPi, -0.5, 0.0, 0.0},
    {'K', 9, JointKind::kRevolute, 13, 1.0, -kHalfPi, 0.5, 0.0, 0.0},
    {'T', 3, JointKind::kPrismatic, 0, 2.0, 0.0, 0.0, 1.0, 0.0},
}};

double member_length(const UnitGeometry& unit, const Member& m) {
  return unit.lengths[static_cast<std::size_t>(m.link)] / m.divisor;
}

// Prismatic offsets follow rho(theta) = l sin(theta / 2).
double rho(double l, double theta) { return l * std::sin(theta / 2.0); }
double rho_d1(double l, double theta) { return 0.5 * l * std::cos(theta / 2.0); }
double rho_d2(double l, double theta) { return -0.25 * l * std::sin(theta / 2.0); }

Vec2 perp(const Vec2& r) { return {-r.y(), r.x()}; }

Vec2 relative_offset(const UnitGeometry& unit, const Member& m, double theta) {
  const double l = member_length(unit, m);
  switch (m.kind) {
    case JointKind::kRevolute: {
      const double phi = m.phi0 + m.kappa * theta;
      return l * Vec2(std::cos(phi), std::sin(phi));
    }
    case JointKind::kPrismatic:
      return rho(l, theta) * Vec2(m.ux, m.uy);
    case JointKind::kFixed:
      break;
  }
  return Vec2::Zero();
}

void check_range(const UnitGeometry& unit, double theta) {
  constexpr double kSlack = 1e-9;
  const double lo = unit.stowed_angle_rad();
  const double hi = unit.deployed_angle_rad();
  if (!(theta >= lo - kSlack && theta <= hi + kSlack)) {
    throw std::out_of_range(fmt::format(
        "scissor angle {:.6g} deg outside [stowed {:g}, deployed {:g}] deg", rad_to_deg(theta),
        unit.stowed_angle_deg, unit.deployed_angle_deg));
  }
}

void split_path_acceleration(PointState& p) {
  const double speed = p.velocity.norm();
  if (speed > 0.0) {
    const Vec2 tangent = p.velocity / speed;
    p.accel_tangential = p.acceleration.dot(tangent) * tangent;
    p.accel_normal = p.acceleration - p.accel_tangential;
  } else {
    p.accel_tangential = p.acceleration;
    p.accel_normal = Vec2::Zero();
  }
}

}  // namespace

const PointState& KinematicState::point(char label) const {
  for (const auto& p : points) {
    if (p.label == label) return p;
  }
  throw std::out_of_range(std::string("no point labelled ") + label);
}

KinematicState solve_positions(const UnitGeometry& unit, double theta) {
  check_range(unit, theta);
  KinematicState state;
  state.theta = theta;
  state.points.reserve(kMembers.size());
  for (const Member& m : kMembers) {
    PointState p;
    p.label = m.label;
    p.parent = m.parent;
    p.joint = m.kind;
    if (m.parent >= 0) {
      p.position = state.points[static_cast<std::size_t>(m.parent)].position +
                   relative_offset(unit, m, theta);
    }
    state.points.push_back(p);
  }
  state.positions_solved = true;
  return state;
}

double unit_height(const UnitGeometry& unit, double theta) {
  const KinematicState s = solve_positions(unit, theta);
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& p : s.points) {
    lo = std::min(lo, p.position.y());
    hi = std::max(hi, p.position.y());
  }
  return hi - lo;
}

double unit_width(const UnitGeometry& unit, double theta) {
  const KinematicState s = solve_positions(unit, theta);
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& p : s.points) {
    lo = std::min(lo, p.position.x());
    hi = std::max(hi, p.position.x());
  }
  return hi - lo;
}

double slider_travel(const UnitGeometry& unit, double theta) {
  return rho(member_length(unit, kMembers[1]), theta);
}

double slider_travel_rate(const UnitGeometry& unit, double theta) {
  return rho_d1(member_length(unit, kMembers[1]), theta);
}

double tangential_speed(double radius, double omega) { return radius * omega; }

double normal_acceleration(double speed, double radius) {
  if (radius == 0.0) throw std::domain_error("normal acceleration is singular at zero radius");
  return speed * speed / radius;
}

KinematicState chain_velocities(const UnitGeometry& unit, KinematicState state) {
  if (!state.positions_solved) throw std::logic_error("positions must be solved first");
  const double theta = state.theta;
  state.theta_dot = state.slider_speed / slider_travel_rate(unit, theta);

  for (std::size_t i = 0; i < state.points.size(); ++i) {
    PointState& p = state.points[i];
    const Member& m = kMembers[i];
    if (m.parent < 0) {
      p.velocity = Vec2::Zero();
      continue;
    }
    const PointState& parent = state.points[static_cast<std::size_t>(m.parent)];
    const Vec2 r = p.position - parent.position;
    if (m.kind == JointKind::kRevolute) {
      p.link_rate = m.kappa * state.theta_dot;
      p.rel_velocity = p.link_rate * perp(r);
    } else {
      p.link_rate = 0.0;
      p.rel_velocity = rho_d1(member_length(unit, m), theta) * state.theta_dot * Vec2(m.ux, m.uy);
    }
    p.velocity = parent.velocity + p.rel_velocity;
  }
  state.velocities_solved = true;
  return state;
}

KinematicState chain_accelerations(const UnitGeometry& unit, KinematicState state) {
  if (!state.velocities_solved) throw std::logic_error("velocities must be computed first");
  const double theta = state.theta;
  const double l_slider = member_length(unit, kMembers[1]);
  // Constant slider speed: d/dt (rho' theta_dot) = 0.
  state.theta_ddot = -rho_d2(l_slider, theta) * state.theta_dot * state.theta_dot /
                     rho_d1(l_slider, theta);

  for (std::size_t i = 0; i < state.points.size(); ++i) {
    PointState& p = state.points[i];
    const Member& m = kMembers[i];
    if (m.parent < 0) {
      p.acceleration = Vec2::Zero();
      split_path_acceleration(p);
      continue;
    }
    const PointState& parent = state.points[static_cast<std::size_t>(m.parent)];
    const Vec2 r = p.position - parent.position;
    if (m.kind == JointKind::kRevolute) {
      if (r.norm() == 0.0) {
        throw std::domain_error(std::string("point ") + m.label + " rotates at zero radius");
      }
      p.link_accel = m.kappa * state.theta_ddot;
      // |rel_normal| = |V_rel|^2 / |r|, directed to the parent.
      p.rel_normal = -p.link_rate * p.link_rate * r;
      p.rel_tangential = p.link_accel * perp(r);
    } else {
      const double l = member_length(unit, m);
      const double slide = rho_d2(l, theta) * state.theta_dot * state.theta_dot +
                           rho_d1(l, theta) * state.theta_ddot;
      p.link_accel = 0.0;
      p.rel_normal = Vec2::Zero();
      p.rel_tangential = slide * Vec2(m.ux, m.uy);
    }
    p.acceleration = parent.acceleration + p.rel_normal + p.rel_tangential;
    split_path_acceleration(p);
  }
  state.accelerations_solved = true;
  return state;
}

KinematicState solve_state(const UnitGeometry& unit, double theta, double slider_speed) {
  KinematicState s = solve_positions(unit, theta);
  s.slider_speed = slider_speed;
  return chain_accelerations(unit, chain_velocities(unit, std::move(s)));
}

double deployment_duration(const UnitGeometry& unit, double slider_speed) {
  if (!(slider_speed > 0.0)) throw std::domain_error("slider speed must be positive");
  const double travel = slider_travel(unit, unit.deployed_angle_rad()) -
                        slider_travel(unit, unit.stowed_angle_rad());
  return travel / slider_speed;
}

namespace {

// One leg from theta0 with signed slider speed; appends samples after
// `t_offset`. The first sample is skipped when `skip_first` is set.
void integrate_leg(const UnitGeometry& unit, double theta0, double speed, double duration,
                   int steps, double t_offset, bool skip_first, DeploymentProfile& out) {
  const auto rate = [&](double th) { return speed / slider_travel_rate(unit, th); };
  const double h = duration / steps;
  double theta = theta0;
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) {
      const double k1 = rate(theta);
      const double k2 = rate(theta + 0.5 * h * k1);
      const double k3 = rate(theta + 0.5 * h * k2);
      const double k4 = rate(theta + h * k3);
      theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      // The scissor stops at its end angles; truncation error must not carry past them.
      theta = std::clamp(theta, unit.stowed_angle_rad(), unit.deployed_angle_rad());
    }
    if (k == 0 && skip_first) continue;
    const double t = k == steps ? t_offset + duration : t_offset + k * h;
    out.time.push_back(t);
    out.theta.push_back(theta);
    out.states.push_back(solve_state(unit, theta, speed));
  }
}

}  // namespace

DeploymentProfile deployment_profile(const UnitGeometry& unit, double slider_speed,
                                     DeployDirection direction, int steps) {
  if (!(slider_speed > 0.0)) throw std::domain_error("slider speed must be positive");
  if (steps < 0) throw std::domain_error("step count must be non-negative");
  DeploymentProfile profile;
  const double leg = deployment_duration(unit, slider_speed);
  switch (direction) {
    case DeployDirection::kDeploy:
      profile.total_duration = leg;
      break;
    case DeployDirection::kStow:
      profile.total_duration = leg;
      break;
    case DeployDirection::kFullCycle:
      profile.total_duration = 2.0 * leg;
      break;
  }
  if (steps == 0) return profile;

  const double stowed = unit.stowed_angle_rad();
  const double deployed = unit.deployed_angle_rad();
  switch (direction) {
    case DeployDirection::kDeploy:
      integrate_leg(unit, stowed, slider_speed, leg, steps, 0.0, false, profile);
      break;
    case DeployDirection::kStow:
      integrate_leg(unit, deployed, -slider_speed, leg, steps, 0.0, false, profile);
      break;
    case DeployDirection::kFullCycle:
      integrate_leg(unit, stowed, slider_speed, leg, steps, 0.0, false, profile);
      integrate_leg(unit, profile.theta.back(), -slider_speed, leg, steps, leg, true, profile);
      break;
  }
  return profile;
}

KinematicCurves kinematic_curves(const DeploymentProfile& profile, char tracked_point) {
  KinematicCurves c;
  c.time = profile.time;
  for (const KinematicState& s : profile.states) {
    const PointState& p = s.point(tracked_point);
    c.linear_velocity.push_back(p.velocity.norm());
    c.angular_velocity.push_back(0.5 * std::abs(s.theta_dot));
    c.linear_acceleration.push_back(p.acceleration.norm());
    c.angular_acceleration.push_back(0.5 * std::abs(s.theta_ddot));
  }
  return c;
}

}  // namespace scissortruss
