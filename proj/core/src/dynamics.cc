#include "scissortruss/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scissortruss/geometry.hpp"

namespace scissortruss {

void DynamicParams::validate() const {
  if (!(mass > 0.0)) throw std::domain_error("mass must be positive");
  if (!(stiffness >= 0.0)) throw std::domain_error("stiffness must be non-negative");
  if (!(ring_radius > 0.0)) throw std::domain_error("ring radius must be positive");
  if (!(unit_length >= 0.0)) throw std::domain_error("unit length must be non-negative");
  if (!(gravity >= 0.0)) throw std::domain_error("gravity must be non-negative");
  if (unit_count < 1) throw std::domain_error("unit count must be positive");
}

EnergyComponents energy_components(const OscillationState& s, const DynamicParams& p) {
  p.validate();
  const double n = p.unit_count;
  const double inertia = p.mass * (p.ring_radius * p.ring_radius + p.unit_length * p.unit_length);
  EnergyComponents e;
  e.kinetic = 0.5 * n * inertia * s.theta_dot * s.theta_dot;
  e.elastic = 0.5 * n * p.stiffness * p.ring_radius * p.ring_radius * s.theta * s.theta;
  e.gravitational = n * p.mass * p.gravity * p.unit_length * s.theta;
  return e;
}

NaturalFrequency natural_frequency(const DynamicParams& p) {
  p.validate();
  NaturalFrequency f;
  const double r2 = p.ring_radius * p.ring_radius;
  f.omega = std::sqrt(p.stiffness * r2 / (p.mass * (r2 + p.unit_length * p.unit_length)));
  f.hertz = f.omega / (2.0 * std::numbers::pi);
  f.degenerate = p.stiffness == 0.0;
  return f;
}

double equilibrium_angle(const DynamicParams& p) {
  p.validate();
  if (p.stiffness == 0.0) throw std::domain_error("no static equilibrium without stiffness");
  return -p.mass * p.gravity * p.unit_length / (p.stiffness * p.ring_radius * p.ring_radius);
}

std::vector<OscillationState> simulate_oscillation(const DynamicParams& p,
                                                   const OscillationState& s0, double dt,
                                                   double t_end) {
  p.validate();
  if (!(dt > 0.0)) throw std::domain_error("time step must be positive");
  if (!(t_end > dt)) throw std::domain_error("end time must exceed one step");

  const double w2 = natural_frequency(p).omega * natural_frequency(p).omega;
  const double r2l2 = p.ring_radius * p.ring_radius + p.unit_length * p.unit_length;
  const double load = p.gravity * p.unit_length / r2l2;

  // Implicit midpoint on x' = v, v' = -w2 x - load. The 2x2 solve is closed
  // form; the rule preserves the quadratic energy of this affine system.
  const double h = dt;
  const double det = 1.0 + 0.25 * h * h * w2;

  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  std::vector<OscillationState> traj;
  traj.reserve(static_cast<std::size_t>(steps) + 1);
  OscillationState s = s0;
  traj.push_back(s);
  for (long k = 1; k <= steps; ++k) {
    const double step = (k == steps) ? (s0.t + t_end) - s.t : h;
    const double d = (step == h) ? det : 1.0 + 0.25 * step * step * w2;
    const double rhs_x = s.theta + 0.5 * step * s.theta_dot;
    const double rhs_v = s.theta_dot - 0.5 * step * w2 * s.theta - step * load;
    const double x_new = (rhs_x + 0.5 * step * rhs_v) / d;
    const double v_new = rhs_v - 0.5 * step * w2 * x_new;
    s.theta = x_new;
    s.theta_dot = v_new;
    s.t = (k == steps) ? s0.t + t_end : s0.t + k * h;
    traj.push_back(s);
  }
  return traj;
}

double relative_difference(double value, double reference) {
  if (reference == 0.0) throw std::domain_error("relative difference against zero reference");
  return (value - reference) / reference;
}

ComparisonReport compare_references(const DynamicParams& p,
                                    const std::vector<FrequencyReference>& refs,
                                    double flag_threshold) {
  ComparisonReport report;
  report.flag_threshold = flag_threshold;
  for (const FrequencyReference& ref : refs) {
    ComparisonRow row;
    row.label = ref.label;
    row.reported_hz = ref.natural_hz;
    row.sim_with_links_hz = ref.sim_with_links_hz;
    row.sim_without_links_hz = ref.sim_without_links_hz;
    if (!ref.is_antenna_row && ref.aperture) {
      DynamicParams q = p;
      q.ring_radius = *ref.aperture / 2.0;
      q.unit_length = stretched_length(*ref.aperture, p.unit_count);
      row.analytic_hz = natural_frequency(q).hertz;
    }
    if (row.analytic_hz && ref.sim_with_links_hz && *ref.sim_with_links_hz > 0.0) {
      row.rel_diff_with_links = relative_difference(*row.analytic_hz, *ref.sim_with_links_hz);
    }
    if (row.analytic_hz && ref.sim_without_links_hz && *ref.sim_without_links_hz > 0.0) {
      row.rel_diff_without_links =
          relative_difference(*row.analytic_hz, *ref.sim_without_links_hz);
    }
    row.comparison_only = !row.rel_diff_with_links && !row.rel_diff_without_links;
    for (const auto& d : {row.rel_diff_with_links, row.rel_diff_without_links}) {
      if (d && std::abs(*d) > flag_threshold) row.flagged = true;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace scissortruss
