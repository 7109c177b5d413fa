#include "scissortruss/optimize/geometry_optimization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "scissortruss/dynamics.hpp"

namespace scissortruss {

namespace {

// First link index of each group and the number of links in it.
constexpr std::array<std::pair<std::size_t, std::size_t>, kLinkGroupCount> kGroups{
    {{0, 2}, {2, 4}, {6, 4}, {10, 4}}};

double base_radius(const GeometryProblem& p) { return p.baseline.aperture / 2.0; }

double upper_radius(const GeometryProblem& p) {
  return p.r_max.value_or(std::numeric_limits<double>::infinity());
}

GeometryPoint uniform_point(double radius, double scale) {
  GeometryPoint x;
  x.radius = radius;
  x.scales.fill(scale);
  return x;
}

}  // namespace

void GeometryProblem::validate() const {
  if (!(baseline.aperture > 0.0) || baseline.unit_count < 3) {
    throw std::invalid_argument("baseline design needs aperture > 0 and at least 3 units");
  }
  if (!(r_min > 0.0)) throw std::invalid_argument("r_min must be positive");
  if (r_max && !(*r_max >= r_min)) throw std::invalid_argument("r_max must be >= r_min");
  if (!(f_lo < f_hi)) throw std::invalid_argument("frequency window needs f_lo < f_hi");
  if (!(scale_lo > 0.0 && scale_lo <= scale_hi)) {
    throw std::invalid_argument("link scale bounds need 0 < lo <= hi");
  }
  if (!(stiffness > 0.0)) throw std::invalid_argument("stiffness must be positive");
  if (mass.enabled ? !(mass.linear_density > 0.0) : !(mass.fixed_mass > 0.0)) {
    throw std::invalid_argument("mass model parameters must be positive");
  }
}

Vector GeometryPoint::to_vector() const {
  Vector x(1 + kLinkGroupCount);
  x[0] = radius;
  for (std::size_t g = 0; g < kLinkGroupCount; ++g) x[static_cast<Eigen::Index>(g + 1)] = scales[g];
  return x;
}

GeometryPoint GeometryPoint::from_vector(const Vector& x) {
  if (x.size() != static_cast<Eigen::Index>(1 + kLinkGroupCount)) {
    throw std::invalid_argument("geometry decision vector must have 5 entries");
  }
  GeometryPoint p;
  p.radius = x[0];
  for (std::size_t g = 0; g < kLinkGroupCount; ++g) p.scales[g] = x[static_cast<Eigen::Index>(g + 1)];
  return p;
}

AntennaDesign design_at(const GeometryProblem& p, const GeometryPoint& x) {
  AntennaDesign d = p.baseline;
  const double ratio = x.radius / base_radius(p);
  d.aperture = 2.0 * x.radius;
  for (std::size_t g = 0; g < kLinkGroupCount; ++g) {
    const auto [first, count] = kGroups[g];
    for (std::size_t i = first; i < first + count; ++i) {
      d.unit.lengths[i] = p.baseline.unit.lengths[i] * ratio * x.scales[g];
    }
  }
  d.unit.deployed_height = p.baseline.unit.deployed_height * ratio * x.scales[0];
  d.unit.stretched_length = stretched_length(d.aperture, d.unit_count);
  return d;
}

double unit_mass(const GeometryProblem& p, const GeometryPoint& x) {
  if (!p.mass.enabled) return p.mass.fixed_mass;
  return p.mass.linear_density * design_at(p, x).unit.total_link_length();
}

double frequency_at(const GeometryProblem& p, const GeometryPoint& x) {
  DynamicParams dp;
  dp.mass = unit_mass(p, x);
  dp.stiffness = p.stiffness;
  dp.ring_radius = x.radius;
  dp.unit_length = stretched_length(2.0 * x.radius, p.baseline.unit_count);
  dp.unit_count = p.baseline.unit_count;
  return natural_frequency(dp).hertz;
}

FrequencyComparison compare_frequency(double predicted_hz, double simulated_hz) {
  FrequencyComparison c;
  c.predicted_hz = predicted_hz;
  c.simulated_hz = simulated_hz;
  c.absolute_difference = std::abs(predicted_hz - simulated_hz);
  c.relative_difference = relative_difference(predicted_hz, simulated_hz);
  return c;
}

GeometryResult optimize_geometry(const GeometryProblem& p) {
  p.validate();
  GeometryResult res;
  const double r_hi = upper_radius(p);
  const GeometryPoint base = uniform_point(base_radius(p), 1.0);
  res.baseline_frequency_hz = frequency_at(p, base);

  // The frequency falls as R or any scale grows, so the extreme corners bound
  // what the window can reach.
  const double f_max = frequency_at(p, uniform_point(p.r_min, p.scale_lo));
  const double f_min = std::isfinite(r_hi) ? frequency_at(p, uniform_point(r_hi, p.scale_hi)) : 0.0;

  if (!p.mass.enabled) {
    res.flat_objective = true;
    res.warnings.push_back(
        "mass model disabled: the natural frequency does not depend on radius or link lengths, "
        "so there is nothing to optimize");
  }
  if (f_max < p.f_lo || f_min > p.f_hi) {
    res.infeasible_window = true;
    res.warnings.push_back(fmt::format(
        "reachable frequencies span [{:.6g}, {:.6g}] Hz for R in [{:.6g}, {}] but the "
        "window is [{:.6g}, {:.6g}] Hz",
        f_min, f_max, p.r_min, std::isfinite(r_hi) ? fmt::format("{:.6g}", r_hi) : "inf", p.f_lo,
        p.f_hi));
  }

  GeometryPoint start = uniform_point(std::clamp(base_radius(p), p.r_min, r_hi), 1.0);
  for (double& s : start.scales) s = std::clamp(s, p.scale_lo, p.scale_hi);

  const auto in_window = [&](double f) { return f >= p.f_lo && f <= p.f_hi; };
  if (!res.infeasible_window && !res.flat_objective && !in_window(frequency_at(p, start))) {
    // Walk the diagonal from the high-frequency corner towards the low one
    // and bisect for the window midpoint, giving a feasible start.
    const double target = 0.5 * (p.f_lo + p.f_hi);
    const double r_top = std::isfinite(r_hi) ? r_hi : std::max(p.r_min, base_radius(p)) * 1e3;
    const auto along = [&](double u) {
      return uniform_point(p.r_min + u * (r_top - p.r_min),
                           p.scale_lo + u * (p.scale_hi - p.scale_lo));
    };
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (frequency_at(p, along(mid)) > target ? lo : hi) = mid;
    }
    start = along(0.5 * (lo + hi));
    res.log.push_back(fmt::format("start moved into the window at R = {:.6g}", start.radius));
  }

  // Work in units of the baseline frequency and radius so every variable and
  // constraint sits near one.
  const double f_ref = res.baseline_frequency_hz;
  const double r_ref = base_radius(p);
  const auto point = [&](const Vector& x) {
    GeometryPoint g = GeometryPoint::from_vector(x);
    g.radius *= r_ref;
    return g;
  };
  const auto freq = [&](const Vector& x) { return frequency_at(p, point(x)); };
  const auto grad = [&](const Vector& x) {
    return central_gradient([&](const Vector& y) { return freq(y) / f_ref; }, x);
  };

  ScalarFunction objective{[&](const Vector& x) { return freq(x) / f_ref; }, grad};
  std::vector<ScalarFunction> constraints;
  const auto bound = [&](Eigen::Index i, double value, double sign) {
    constraints.push_back({[=](const Vector& x) { return sign * (x[i] - value); },
                           [=](const Vector& x) {
                             Vector g = Vector::Zero(x.size());
                             g[i] = sign;
                             return g;
                           }});
  };
  bound(0, p.r_min / r_ref, 1.0);
  if (std::isfinite(r_hi)) bound(0, r_hi / r_ref, -1.0);
  for (Eigen::Index i = 1; i <= static_cast<Eigen::Index>(kLinkGroupCount); ++i) {
    bound(i, p.scale_lo, 1.0);
    bound(i, p.scale_hi, -1.0);
  }
  constraints.push_back({[&](const Vector& x) { return (freq(x) - p.f_lo) / f_ref; }, grad});
  constraints.push_back({[&](const Vector& x) { return (p.f_hi - freq(x)) / f_ref; },
                         [&](const Vector& x) -> Vector { return -grad(x); }});

  Vector x0 = start.to_vector();
  x0[0] /= r_ref;

  GeometryPoint best = start;
  if (res.infeasible_window || res.flat_objective) {
    res.status = res.infeasible_window ? "infeasible" : "flat_objective";
    res.objective_trace.push_back(frequency_at(p, start));
  } else {
    RefineConfig cfg = p.refine;
    cfg.tol_con = p.refine.tol_con / std::max({1.0, f_ref, r_ref});
    const RefineResult r = sqp_refine(objective, x0, constraints, cfg);
    best = point(r.x);
    for (double v : r.objective_trace) res.objective_trace.push_back(v * f_ref);
    res.converged = r.converged;
    res.status = to_string(r.status);
    res.iterations = r.iterations;
    res.function_evals = r.function_evals;
    res.log.insert(res.log.end(), r.log.begin(), r.log.end());
  }

  res.point = best;
  res.design = design_at(p, best);
  res.frequency_hz = frequency_at(p, best);
  res.mass = unit_mass(p, best);

  const double tol = p.refine.tol_con;
  const auto check = [&](std::string name, double value) {
    res.constraints.push_back({std::move(name), value, value >= -tol});
  };
  check("radius >= r_min", best.radius - p.r_min);
  if (std::isfinite(r_hi)) check("radius <= r_max", r_hi - best.radius);
  check("frequency >= f_lo", res.frequency_hz - p.f_lo);
  check("frequency <= f_hi", p.f_hi - res.frequency_hz);
  for (std::size_t g = 0; g < kLinkGroupCount; ++g) {
    check(fmt::format("{} scale >= {:.6g}", kLinkGroupNames[g], p.scale_lo),
          best.scales[g] - p.scale_lo);
    check(fmt::format("{} scale <= {:.6g}", kLinkGroupNames[g], p.scale_hi),
          p.scale_hi - best.scales[g]);
  }
  res.feasible = std::all_of(res.constraints.begin(), res.constraints.end(),
                             [](const ConstraintCheck& c) { return c.satisfied; });
  return res;
}

}  // namespace scissortruss
