#pragma once

#include <optional>
#include <string>
#include <vector>

namespace scissortruss {

/// Lumped parameters of the ring model. Defaults reproduce the 25 m baseline
/// substitution (k = 1, m = 1, R0 = 12.5, L = 6.47).
struct DynamicParams {
  double mass = 1.0;        // per unit, kg
  double stiffness = 1.0;   // N/m
  double ring_radius = 12.5;  // R0, m
  double unit_length = 6.47;  // L, m
  double gravity = 0.0;     // m/s^2
  int unit_count = 12;

  void validate() const;
};

struct OscillationState {
  double theta = 0.0;
  double theta_dot = 0.0;
  double t = 0.0;
};

struct EnergyComponents {
  double kinetic = 0.0;
  double elastic = 0.0;
  double gravitational = 0.0;
  double total() const { return kinetic + elastic + gravitational; }
};

/// T = (N/2) m (R0^2 + L^2) theta_dot^2, Ve = (N/2) k R0^2 theta^2,
/// Vg = N m g L theta.
EnergyComponents energy_components(const OscillationState& s, const DynamicParams& p);

struct NaturalFrequency {
  double omega = 0.0;  // rad/s
  double hertz = 0.0;
  bool degenerate = false;  // k == 0
};

/// Undamped small-angle frequency with the gravity term dropped:
/// omega_n = sqrt(k R0^2 / (m (R0^2 + L^2))).
NaturalFrequency natural_frequency(const DynamicParams& p);

/// Static offset of the gravity-loaded oscillator, -m g L / (k R0^2).
double equilibrium_angle(const DynamicParams& p);

/// theta_ddot + omega_n^2 theta + g L / (R0^2 + L^2) = 0, integrated with the
/// implicit midpoint rule on a fixed step. Samples include s0 and the end.
/// Throws std::domain_error unless dt > 0 and t_end > dt.
std::vector<OscillationState> simulate_oscillation(const DynamicParams& p,
                                                   const OscillationState& s0, double dt,
                                                   double t_end);

// ---------------------------------------------------------------------------
// Reference comparison
// ---------------------------------------------------------------------------

/// Row of a bundled frequency table. Text fields keep the source strings
/// verbatim; numeric fields are filled only when the text is a plain number.
struct FrequencyReference {
  std::string label;  // aperture label ("25", "6(2)") or antenna name
  std::optional<double> aperture;
  std::string natural_text;
  std::optional<double> natural_hz;
  std::optional<double> sim_with_links_hz;
  std::optional<double> sim_without_links_hz;
  bool is_antenna_row = false;
};

struct ComparisonRow {
  std::string label;
  std::optional<double> analytic_hz;
  std::optional<double> reported_hz;
  std::optional<double> sim_with_links_hz;
  std::optional<double> sim_without_links_hz;
  std::optional<double> rel_diff_with_links;  // (analytic - sim) / sim
  std::optional<double> rel_diff_without_links;
  bool flagged = false;  // some relative difference exceeds the threshold
  bool comparison_only = false;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double flag_threshold = 0.5;
};

/// Analytic frequency per aperture row (R0 = D/2, L = stretched chord for
/// p.unit_count) against the stored simulation values.
ComparisonReport compare_references(const DynamicParams& p,
                                    const std::vector<FrequencyReference>& refs,
                                    double flag_threshold = 0.5);

/// (a - b) / b.
double relative_difference(double value, double reference);

}  // namespace scissortruss
