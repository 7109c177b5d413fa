#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "scissortruss/geometry.hpp"
#include "scissortruss/optimize/sqp.hpp"

namespace scissortruss {

/// Link groups that receive their own scale factor.
inline constexpr std::size_t kLinkGroupCount = 4;
inline constexpr std::array<const char*, kLinkGroupCount> kLinkGroupNames{
    "main_diagonal", "horizontal", "half_diagonal", "quarter_diagonal"};

struct MassModel {
  bool enabled = true;
  double linear_density = 1.0;  // kg per metre of link, used when enabled
  double fixed_mass = 1.0;      // kg per unit, used when disabled
};

/// Ring radius R and one scale per link group. Link lengths follow the
/// baseline unit scaled by R / R_base and by the group scale. The unit mass
/// comes from `mass`; the chord is stretched_length(2R, N).
struct GeometryProblem {
  AntennaDesign baseline;
  double stiffness = 1.0;
  MassModel mass;
  double r_min = 12.5;
  std::optional<double> r_max;
  double f_lo = 0.018;
  double f_hi = 0.03;
  double scale_lo = 0.8;
  double scale_hi = 1.25;
  RefineConfig refine{.fitness_target = 0.0,
                      .tol_x = 1e-12,
                      .tol_fun = 1e-15,
                      .tol_con = 1e-9,
                      .max_function_evals = 20000,
                      .max_iterations = 500,
                      .feasible_iterates = true};

  void validate() const;
};

/// Decision vector layout: [R, s_main, s_horizontal, s_half, s_quarter].
struct GeometryPoint {
  double radius = 0.0;
  std::array<double, kLinkGroupCount> scales{1.0, 1.0, 1.0, 1.0};

  Vector to_vector() const;
  static GeometryPoint from_vector(const Vector& x);
};

AntennaDesign design_at(const GeometryProblem& p, const GeometryPoint& x);
double unit_mass(const GeometryProblem& p, const GeometryPoint& x);
double frequency_at(const GeometryProblem& p, const GeometryPoint& x);

struct ConstraintCheck {
  std::string name;
  double value = 0.0;  // >= 0 when satisfied
  bool satisfied = false;
};

struct GeometryResult {
  AntennaDesign design;
  GeometryPoint point;
  double frequency_hz = 0.0;
  double baseline_frequency_hz = 0.0;
  double mass = 0.0;
  std::vector<ConstraintCheck> constraints;
  std::vector<double> objective_trace;  // Hz, one entry per accepted iterate
  bool feasible = false;
  bool infeasible_window = false;
  bool flat_objective = false;
  bool converged = false;
  std::string status;
  int iterations = 0;
  int function_evals = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> log;
};

/// Minimises the natural frequency over the decision box subject to
/// R >= R_min and f_lo <= f <= f_hi. An empty window is reported through
/// `infeasible_window` without optimizing. A disabled mass model makes the
/// frequency independent of every variable; this is reported through
/// `flat_objective` and the start point is returned unchanged.
GeometryResult optimize_geometry(const GeometryProblem& p);

/// Published outcome of the geometry optimization, kept for comparison.
struct ReferenceGeometry {
  double radius = 13.65;
  double frequency_hz = 0.1107;
  double simulated_hz = 0.10859;
  double relative_difference = 0.0194;
  std::array<double, kLinkGroupCount> original_lengths{6.64, 2.14, 3.32, 1.66};
  std::array<double, kLinkGroupCount> optimized_lengths{7.09, 2.41, 3.54, 1.77};
};

inline constexpr ReferenceGeometry kReferenceGeometry{};

struct FrequencyComparison {
  double predicted_hz = 0.0;
  double simulated_hz = 0.0;
  double absolute_difference = 0.0;
  double relative_difference = 0.0;  // (predicted - simulated) / simulated
};

FrequencyComparison compare_frequency(double predicted_hz, double simulated_hz);

}  // namespace scissortruss
