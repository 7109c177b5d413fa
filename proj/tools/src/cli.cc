#include "cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "scissortruss/dynamics.hpp"
#include "scissortruss/geometry.hpp"
#include "scissortruss/io.hpp"
#include "scissortruss/kinematics.hpp"
#include "scissortruss/materials.hpp"
#include "scissortruss/optimize/geometry_optimization.hpp"
#include "scissortruss/optimize/surrogate.hpp"
#include "svg.hpp"

#ifndef SCISSORTRUSS_DEFAULT_DATA_DIR
#define SCISSORTRUSS_DEFAULT_DATA_DIR "data"
#endif

namespace scissortruss::cli {

namespace fs = std::filesystem;

namespace {

// Collects artifacts in memory so nothing reaches disk until every
// computation of a command has succeeded.
class Artifacts {
 public:
  void add(std::string name, std::string text) { files_.emplace_back(std::move(name), std::move(text)); }

  void flush(const fs::path& dir, ReportBundle& bundle) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    for (const auto& [name, text] : files_) {
      write_text(dir / name, text);
      bundle.paths.push_back(dir / name);
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string yes_no(bool b) { return b ? "true" : "false"; }

struct DesignInput {
  std::vector<double> apertures;
  int unit_count = kBaseline.unit_count;
  std::optional<bool> with_links;
  double deployed_angle = kDeployedAngleDeg;
  double stowed_angle = kStowedAngleDeg;
};

DesignInput read_design_input(const ConfigObject& c, bool aperture_required) {
  DesignInput in;
  if (aperture_required || c.has("aperture_m")) {
    in.apertures = c.number_list("aperture_m");
  } else {
    in.apertures = {kBaseline.aperture};
  }
  in.unit_count = c.integer("unit_count", kBaseline.unit_count);
  if (c.has("with_links")) in.with_links = c.boolean("with_links", true);
  in.deployed_angle = c.number("deployed_angle_deg", kDeployedAngleDeg);
  in.stowed_angle = c.number("stowed_angle_deg", kStowedAngleDeg);
  if (in.unit_count < 3) throw ConfigError("key 'unit_count': at least 3 units are needed");
  return in;
}

Json unit_json(const UnitGeometry& u) {
  return Json{{"lengths_m", u.lengths},
              {"deployed_height_m", u.deployed_height},
              {"stretched_length_m", u.stretched_length},
              {"deployed_angle_deg", u.deployed_angle_deg},
              {"stowed_angle_deg", u.stowed_angle_deg},
              {"total_link_length_m", u.total_link_length()}};
}

Json metrics_json(const DesignMetrics& m) {
  return Json{{"aperture_m", m.aperture},
              {"unit_count", m.unit_count},
              {"with_links", m.with_links},
              {"stretched_length_m", m.stretched_length},
              {"deployed_height_m", m.deployed_height},
              {"stowed_height_m", m.stowed_height},
              {"deployed_diameter_m", m.deployed_diameter},
              {"stowed_diameter_m", m.stowed_diameter},
              {"deployed_volume_m3", m.deployed_volume},
              {"stowed_volume_m3", m.stowed_volume},
              {"sr_diameter", m.sr_diameter},
              {"sr_height", m.sr_height},
              {"sr_volume", m.sr_volume},
              {"extrapolated", m.extrapolated}};
}

CsvTable metrics_table(const std::vector<DesignMetrics>& rows) {
  CsvTable t;
  t.header = {"aperture_m",         "unit_count",          "with_links",       "stretched_length_m",
              "deployed_height_m",  "stowed_height_m",     "deployed_diameter_m",
              "stowed_diameter_m",  "deployed_volume_m3",  "stowed_volume_m3", "sr_diameter",
              "sr_height",          "sr_volume",           "extrapolated"};
  for (const DesignMetrics& m : rows) {
    t.rows.push_back({csv_number(m.aperture), std::to_string(m.unit_count), yes_no(m.with_links),
                      csv_number(m.stretched_length), csv_number(m.deployed_height),
                      csv_number(m.stowed_height), csv_number(m.deployed_diameter),
                      csv_number(m.stowed_diameter), csv_number(m.deployed_volume),
                      csv_number(m.stowed_volume), csv_number(m.sr_diameter),
                      csv_number(m.sr_height), csv_number(m.sr_volume), yes_no(m.extrapolated)});
  }
  return t;
}

std::string height_note(const UnitGeometry& unit, const DesignMetrics& m) {
  return fmt::format(
      "unit height differs between the link-length chain ({:.4g} m) and the metrics table "
      "({:.4g} m) at aperture {:g} m",
      unit.deployed_height, m.deployed_height, m.aperture);
}

// ---------------------------------------------------------------------------

struct AnalyzeInput {
  DesignInput design;
  double slider_speed = 0.1;
  int steps = 200;
  DeployDirection direction = DeployDirection::kDeploy;
  std::string direction_name = "deploy";
  char tracked = 'C';
  double mass = 1.0;
  double stiffness = 1.0;
  double gravity = 0.0;
  double theta0 = 0.01;
  double periods = 20.0;
  int steps_per_period = 200;
  LinkageCount linkage = kTrussLinkageCount;
  std::optional<int> claimed = kTrussClaimedMobility;
  double flag_threshold = 0.5;
};

AnalyzeInput read_analyze_input(const Json& config) {
  ConfigObject c(config, "");
  c.allow_only({"aperture_m", "unit_count", "with_links", "deployed_angle_deg", "stowed_angle_deg",
                "slider_speed_m_s", "profile_steps", "direction", "tracked_point", "dynamics",
                "simulation", "mobility", "flag_threshold"});
  AnalyzeInput in;
  in.design = read_design_input(c, false);
  if (in.design.apertures.size() != 1) throw ConfigError("key 'aperture_m': analyze takes one aperture");
  in.slider_speed = c.number("slider_speed_m_s", in.slider_speed);
  in.steps = c.integer("profile_steps", in.steps);
  if (in.steps < 0) throw ConfigError("key 'profile_steps': must be >= 0");
  in.direction_name = c.string("direction", in.direction_name);
  if (in.direction_name == "deploy") {
    in.direction = DeployDirection::kDeploy;
  } else if (in.direction_name == "stow") {
    in.direction = DeployDirection::kStow;
  } else if (in.direction_name == "cycle") {
    in.direction = DeployDirection::kFullCycle;
  } else {
    throw ConfigError("key 'direction': expected deploy, stow or cycle");
  }
  const std::string tracked = c.string("tracked_point", "C");
  if (tracked.size() != 1) throw ConfigError("key 'tracked_point': expected one point label");
  in.tracked = tracked[0];

  const ConfigObject dyn = c.object("dynamics");
  dyn.allow_only({"mass", "stiffness", "gravity"});
  in.mass = dyn.number("mass", in.mass);
  in.stiffness = dyn.number("stiffness", in.stiffness);
  in.gravity = dyn.number("gravity", in.gravity);

  const ConfigObject sim = c.object("simulation");
  sim.allow_only({"theta0_rad", "periods", "steps_per_period"});
  in.theta0 = sim.number("theta0_rad", in.theta0);
  in.periods = sim.number("periods", in.periods);
  in.steps_per_period = sim.integer("steps_per_period", in.steps_per_period);
  if (!(in.periods > 0.0) || in.steps_per_period < 4) {
    throw ConfigError("key 'simulation': need periods > 0 and steps_per_period >= 4");
  }

  const ConfigObject mob = c.object("mobility");
  mob.allow_only({"links", "lower_pairs", "higher_pairs", "claimed"});
  in.linkage.links = mob.integer("links", in.linkage.links);
  in.linkage.lower_pairs = mob.integer("lower_pairs", in.linkage.lower_pairs);
  in.linkage.higher_pairs = mob.integer("higher_pairs", in.linkage.higher_pairs);
  if (mob.has("claimed")) in.claimed = mob.integer("claimed", 0);
  in.flag_threshold = c.number("flag_threshold", in.flag_threshold);
  return in;
}

// ---------------------------------------------------------------------------

GAConfig read_ga(const ConfigObject& c, GAConfig ga) {
  c.allow_only({"population_size", "generations", "stall_generation_limit", "fitness_target",
                "tol_con", "tol_fun", "elite_count", "tournament_size", "crossover_rate",
                "mutation_rate", "mutation_scale", "mutation_shrink", "threads"});
  ga.population_size = c.integer("population_size", ga.population_size);
  ga.generations = c.integer("generations", ga.generations);
  ga.stall_generation_limit = c.integer("stall_generation_limit", ga.stall_generation_limit);
  ga.fitness_target = c.number("fitness_target", ga.fitness_target);
  ga.tol_con = c.number("tol_con", ga.tol_con);
  ga.tol_fun = c.number("tol_fun", ga.tol_fun);
  ga.elite_count = c.integer("elite_count", ga.elite_count);
  ga.tournament_size = c.integer("tournament_size", ga.tournament_size);
  ga.crossover_rate = c.number("crossover_rate", ga.crossover_rate);
  ga.mutation_rate = c.number("mutation_rate", ga.mutation_rate);
  ga.mutation_scale = c.number("mutation_scale", ga.mutation_scale);
  ga.mutation_shrink = c.number("mutation_shrink", ga.mutation_shrink);
  ga.threads = c.integer("threads", ga.threads);
  try {
    ga.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("'{}': {}", c.key_path(""), e.what()));
  }
  return ga;
}

RefineConfig read_refine(const ConfigObject& c, RefineConfig r) {
  c.allow_only({"fitness_target", "tol_x", "tol_fun", "tol_con", "max_function_evals",
                "max_iterations", "feasible_iterates"});
  r.fitness_target = c.number("fitness_target", r.fitness_target);
  r.tol_x = c.number("tol_x", r.tol_x);
  r.tol_fun = c.number("tol_fun", r.tol_fun);
  r.tol_con = c.number("tol_con", r.tol_con);
  r.max_function_evals = c.integer("max_function_evals", r.max_function_evals);
  r.max_iterations = c.integer("max_iterations", r.max_iterations);
  r.feasible_iterates = c.boolean("feasible_iterates", r.feasible_iterates);
  if (!(r.tol_x > 0.0 && r.tol_fun > 0.0 && r.tol_con > 0.0)) {
    throw ConfigError(fmt::format("'{}': tolerances must be positive", c.key_path("")));
  }
  if (r.max_function_evals < 1 || r.max_iterations < 1) {
    throw ConfigError(fmt::format("'{}': evaluation and iteration limits must be >= 1", c.key_path("")));
  }
  return r;
}

Json ga_json(const GAConfig& g) {
  return Json{{"population_size", g.population_size},
              {"generations", g.generations},
              {"stall_generation_limit", g.stall_generation_limit},
              {"fitness_target", g.fitness_target},
              {"tol_con", g.tol_con},
              {"tol_fun", g.tol_fun},
              {"elite_count", g.elite_count},
              {"tournament_size", g.tournament_size},
              {"crossover_rate", g.crossover_rate},
              {"mutation_rate", g.mutation_rate},
              {"mutation_scale", g.mutation_scale},
              {"mutation_shrink", g.mutation_shrink},
              {"seed", g.seed}};
}

Json refine_json(const RefineConfig& r) {
  return Json{{"fitness_target", r.fitness_target},
              {"tol_x", r.tol_x},
              {"tol_fun", r.tol_fun},
              {"tol_con", r.tol_con},
              {"max_function_evals", r.max_function_evals},
              {"max_iterations", r.max_iterations},
              {"feasible_iterates", r.feasible_iterates}};
}

struct SurrogateInput {
  double aperture = kBaseline.aperture;
  int unit_count = kBaseline.unit_count;
  double slider_speed = 0.1;
  int samples = 100;
  SurrogateOptions options;
};

struct GeometryInput {
  GeometryProblem problem;
};

struct OptimizeInput {
  bool run_surrogate = true;
  bool run_geometry = true;
  std::uint64_t seed = GAConfig{}.seed;
  SurrogateInput surrogate;
  GeometryInput geometry;
};

OptimizeInput read_optimize_input(const Json& config, const RunContext& ctx) {
  ConfigObject c(config, "");
  c.allow_only({"mode", "seed", "surrogate", "geometry"});
  OptimizeInput in;
  const std::string mode = c.string("mode", "both");
  if (mode == "surrogate") {
    in.run_geometry = false;
  } else if (mode == "geometry") {
    in.run_surrogate = false;
  } else if (mode != "both") {
    throw ConfigError("key 'mode': expected surrogate, geometry or both");
  }
  if (c.has("seed")) {
    if (!c.raw().at("seed").is_number_unsigned()) {
      throw ConfigError("key 'seed': expected a non-negative integer");
    }
    in.seed = c.raw().at("seed").get<std::uint64_t>();
  }
  if (ctx.seed) in.seed = *ctx.seed;

  const ConfigObject s = c.object("surrogate");
  s.allow_only({"aperture_m", "unit_count", "slider_speed_m_s", "samples", "hidden", "runs",
                "weight_bound", "ga", "refine"});
  SurrogateInput& si = in.surrogate;
  si.aperture = s.number("aperture_m", si.aperture);
  si.unit_count = s.integer("unit_count", si.unit_count);
  si.slider_speed = s.number("slider_speed_m_s", si.slider_speed);
  si.samples = s.integer("samples", si.samples);
  si.options.arch.hidden = s.integer("hidden", si.options.arch.hidden);
  si.options.runs = s.integer("runs", si.options.runs);
  si.options.weight_bound = s.number("weight_bound", si.options.weight_bound);
  si.options.ga = read_ga(s.object("ga"), si.options.ga);
  si.options.ga.seed = in.seed;
  si.options.refine = read_refine(s.object("refine"), si.options.refine);
  if (si.samples < 2) throw ConfigError("key 'surrogate.samples': need at least 2");
  if (si.options.arch.hidden < 1) throw ConfigError("key 'surrogate.hidden': need at least 1");
  if (si.options.runs < 1) throw ConfigError("key 'surrogate.runs': need at least 1");
  if (!(si.options.weight_bound > 0.0)) {
    throw ConfigError("key 'surrogate.weight_bound': must be positive");
  }

  const ConfigObject g = c.object("geometry");
  g.allow_only({"aperture_m", "unit_count", "with_links", "r_min", "r_max", "f_lo", "f_hi",
                "scale_lo", "scale_hi", "stiffness", "mass_model", "refine"});
  GeometryProblem& p = in.geometry.problem;
  p.baseline = make_design(g.number("aperture_m", kBaseline.aperture),
                           g.integer("unit_count", kBaseline.unit_count),
                           g.boolean("with_links", true));
  p.r_min = g.number("r_min", p.r_min);
  p.r_max = g.optional_number("r_max");
  p.f_lo = g.number("f_lo", p.f_lo);
  p.f_hi = g.number("f_hi", p.f_hi);
  p.scale_lo = g.number("scale_lo", p.scale_lo);
  p.scale_hi = g.number("scale_hi", p.scale_hi);
  p.stiffness = g.number("stiffness", p.stiffness);
  const ConfigObject mm = g.object("mass_model");
  mm.allow_only({"enabled", "linear_density", "fixed_mass"});
  p.mass.enabled = mm.boolean("enabled", p.mass.enabled);
  p.mass.linear_density = mm.number("linear_density", p.mass.linear_density);
  p.mass.fixed_mass = mm.number("fixed_mass", p.mass.fixed_mass);
  p.refine = read_refine(g.object("refine"), p.refine);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("'geometry': {}", e.what()));
  }
  return in;
}

Json chromosome_json(const Chromosome& w) {
  Json blocks = Json::object();
  const auto h = static_cast<std::size_t>(w.arch.hidden);
  for (std::size_t c = 0; c < kCurveCount; ++c) {
    const auto b = w.block(c);
    blocks[kCurveNames[c]] = Json{{"phi", std::vector<double>(b.begin(), b.begin() + h)},
                                  {"eta", std::vector<double>(b.begin() + h, b.begin() + 2 * h)},
                                  {"b_hidden", std::vector<double>(b.begin() + 2 * h, b.begin() + 3 * h)},
                                  {"b_out", b[3 * h]}};
  }
  return Json{{"hidden", w.arch.hidden}, {"activation", "logistic"}, {"blocks", blocks}};
}

}  // namespace

fs::path default_data_dir() {
  if (const char* env = std::getenv("SCISSORTRUSS_DATA"); env && *env) return fs::path(env);
  return fs::path(SCISSORTRUSS_DEFAULT_DATA_DIR);
}

// ---------------------------------------------------------------------------
// design
// ---------------------------------------------------------------------------

ReportBundle cmd_design(const Json& config, const RunContext& ctx) {
  ConfigObject c(config, "");
  c.allow_only({"aperture_m", "unit_count", "with_links", "deployed_angle_deg", "stowed_angle_deg"});
  const DesignInput in = read_design_input(c, true);

  std::vector<bool> variants;
  if (in.with_links) {
    variants = {*in.with_links};
  } else {
    variants = {true, false};
  }

  ReportBundle bundle;
  Json designs = Json::array();
  std::vector<DesignMetrics> rows;
  CsvTable links;
  links.header = {"aperture_m", "unit_count", "deployed_height_m", "stretched_length_m"};
  for (int i = 1; i <= 14; ++i) links.header.push_back(fmt::format("L{}", i));

  for (double aperture : in.apertures) {
    const AntennaDesign d =
        make_design(aperture, in.unit_count, variants.front(), in.deployed_angle, in.stowed_angle);
    Json metrics = Json::object();
    for (bool wl : variants) {
      const DesignMetrics m = design_metrics(aperture, in.unit_count, wl);
      rows.push_back(m);
      metrics[wl ? "with_links" : "without_links"] = metrics_json(m);
    }
    std::vector<std::string> row{csv_number(aperture), std::to_string(in.unit_count),
                                 csv_number(d.unit.deployed_height),
                                 csv_number(d.unit.stretched_length)};
    for (double l : d.unit.lengths) row.push_back(csv_number(l));
    links.rows.push_back(std::move(row));
    designs.push_back(Json{{"aperture_m", aperture}, {"unit", unit_json(d.unit)}, {"metrics", metrics}});
    bundle.warnings.push_back(height_note(d.unit, rows.back()));
  }
  if (in.unit_count != kBaseline.unit_count) {
    bundle.warnings.push_back(fmt::format(
        "{} units: stow coefficients are extrapolated from the {}-unit baseline", in.unit_count,
        kBaseline.unit_count));
  }
  if (in.deployed_angle != kDeployedAngleDeg || in.stowed_angle != kStowedAngleDeg) {
    bundle.warnings.push_back(
        "metrics rows scale the baseline table and do not depend on the scissor angles");
  }

  Json report{{"unit_count", in.unit_count},
              {"deployed_angle_deg", in.deployed_angle},
              {"stowed_angle_deg", in.stowed_angle},
              {"designs", designs},
              {"warnings", bundle.warnings}};

  Artifacts out;
  out.add("design.json", dump(report));
  out.add("design_links.csv", to_csv(links));
  out.add("design_metrics.csv", to_csv(metrics_table(rows)));
  out.flush(ctx.out_dir, bundle);

  std::string summary;
  for (const DesignMetrics& m : rows) {
    summary += fmt::format(
        "D = {:g} m ({}): stretched {:.4g} m, height {:.4g} m, SR diameter {:.4g}, height {:.4g}, "
        "volume {:.4g}\n",
        m.aperture, m.with_links ? "with links" : "without links", m.stretched_length,
        m.deployed_height, m.sr_diameter, m.sr_height, m.sr_volume);
  }
  bundle.summary = summary;
  return bundle;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

ReportBundle cmd_analyze(const Json& config, const RunContext& ctx) {
  const AnalyzeInput in = read_analyze_input(config);
  const double aperture = in.design.apertures.front();
  const bool with_links = in.design.with_links.value_or(true);
  const AntennaDesign design = make_design(aperture, in.design.unit_count, with_links,
                                           in.design.deployed_angle, in.design.stowed_angle);
  ReportBundle bundle;

  const MobilityReport mob = mobility_report(in.linkage, in.claimed);
  bundle.warnings.insert(bundle.warnings.end(), mob.warnings.begin(), mob.warnings.end());

  const DeploymentProfile profile =
      deployment_profile(design.unit, in.slider_speed, in.direction, in.steps);
  const KinematicCurves curves = kinematic_curves(profile, in.tracked);
  const double leg = deployment_duration(design.unit, in.slider_speed);

  DynamicParams dp;
  dp.mass = in.mass;
  dp.stiffness = in.stiffness;
  dp.gravity = in.gravity;
  dp.ring_radius = aperture / 2.0;
  dp.unit_length = stretched_length(aperture, in.design.unit_count);
  dp.unit_count = in.design.unit_count;
  dp.validate();
  const NaturalFrequency nf = natural_frequency(dp);
  if (nf.degenerate) bundle.warnings.push_back("stiffness is zero: no oscillation");

  const double period = nf.degenerate ? 1.0 : 2.0 * std::numbers::pi / nf.omega;
  const double dt = period / in.steps_per_period;
  const std::vector<OscillationState> traj =
      simulate_oscillation(dp, OscillationState{in.theta0, 0.0, 0.0}, dt, in.periods * period);
  const double e0 = energy_components(traj.front(), dp).total();
  double drift = 0.0;
  for (const OscillationState& s : traj) {
    const double e = energy_components(s, dp).total();
    drift = std::max(drift, e0 != 0.0 ? std::abs(e - e0) / std::abs(e0) : std::abs(e - e0));
  }

  const auto refs = load_frequency_references(ctx.data_dir / "frequency_reference.csv");
  const auto antennas = load_antenna_references(ctx.data_dir / "existing_antennas.csv");
  const auto times = load_deployment_times(ctx.data_dir / "deployment_times.csv");
  const ComparisonReport cmp = compare_references(dp, refs, in.flag_threshold);

  // Tables.
  CsvTable prof;
  prof.header = {"t_s", "theta_rad", "point", "x_m", "y_m", "vx", "vy", "ax", "ay"};
  for (std::size_t i = 0; i < profile.states.size(); ++i) {
    for (const PointState& pt : profile.states[i].points) {
      prof.rows.push_back({csv_number(profile.time[i]), csv_number(profile.theta[i]),
                           std::string(1, pt.label), csv_number(pt.position.x()),
                           csv_number(pt.position.y()), csv_number(pt.velocity.x()),
                           csv_number(pt.velocity.y()), csv_number(pt.acceleration.x()),
                           csv_number(pt.acceleration.y())});
    }
  }
  CsvTable curve_csv;
  curve_csv.header = {"t_s", "linear_velocity", "angular_velocity", "linear_acceleration",
                      "angular_acceleration"};
  for (std::size_t i = 0; i < curves.time.size(); ++i) {
    curve_csv.rows.push_back({csv_number(curves.time[i]), csv_number(curves.linear_velocity[i]),
                              csv_number(curves.angular_velocity[i]),
                              csv_number(curves.linear_acceleration[i]),
                              csv_number(curves.angular_acceleration[i])});
  }
  CsvTable trajectory;
  trajectory.header = {"t_s", "theta_rad", "theta_dot"};
  for (const OscillationState& s : traj) {
    trajectory.rows.push_back({csv_number(s.t), csv_number(s.theta), csv_number(s.theta_dot)});
  }
  CsvTable comparison;
  comparison.header = {"label",           "analytic_hz",           "reported_natural_hz",
                       "sim_with_links_hz", "sim_without_links_hz", "rel_diff_with_links",
                       "rel_diff_without_links", "flagged"};
  const auto opt_csv = [](const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); };
  Json cmp_rows = Json::array();
  for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
    const ComparisonRow& r = cmp.rows[i];
    comparison.rows.push_back({r.label, opt_csv(r.analytic_hz), refs[i].natural_text,
                               opt_csv(r.sim_with_links_hz), opt_csv(r.sim_without_links_hz),
                               opt_csv(r.rel_diff_with_links), opt_csv(r.rel_diff_without_links),
                               yes_no(r.flagged)});
    cmp_rows.push_back(Json{{"label", r.label},
                            {"natural_text", refs[i].natural_text},
                            {"analytic_hz", optional_json(r.analytic_hz)},
                            {"reported_hz", optional_json(r.reported_hz)},
                            {"sim_with_links_hz", optional_json(r.sim_with_links_hz)},
                            {"sim_without_links_hz", optional_json(r.sim_without_links_hz)},
                            {"rel_diff_with_links", optional_json(r.rel_diff_with_links)},
                            {"rel_diff_without_links", optional_json(r.rel_diff_without_links)},
                            {"flagged", r.flagged},
                            {"comparison_only", r.comparison_only}});
    if (r.flagged) {
      bundle.warnings.push_back(fmt::format(
          "reference row '{}': analytic frequency differs from simulation by more than {:g}%",
          r.label, 100.0 * cmp.flag_threshold));
    }
  }
  Json antenna_rows = Json::array();
  for (const FrequencyReference& a : antennas) {
    antenna_rows.push_back(Json{{"antenna", a.label}, {"natural_hz", optional_json(a.natural_hz)}});
  }
  Json time_rows = Json::array();
  for (const DeploymentTimeRecord& t : times) {
    time_rows.push_back(Json{{"mechanism", t.mechanism},
                             {"aperture_m", t.aperture},
                             {"unit_count", t.unit_count},
                             {"intermediate_s", optional_json(t.intermediate_s)},
                             {"complete_deployed_s", optional_json(t.complete_deployed_s)},
                             {"complete_cycle_s", optional_json(t.complete_cycle_s)}});
  }

  const auto peak = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  const DesignMetrics table_row = design_metrics(aperture, in.design.unit_count, with_links);
  bundle.warnings.push_back(height_note(design.unit, table_row));

  Json report{
      {"design",
       {{"aperture_m", aperture},
        {"unit_count", in.design.unit_count},
        {"with_links", with_links},
        {"unit", unit_json(design.unit)},
        {"table_deployed_height_m", table_row.deployed_height}}},
      {"mobility",
       {{"links", mob.count.links},
        {"lower_pairs", mob.count.lower_pairs},
        {"higher_pairs", mob.count.higher_pairs},
        {"mobility", mob.mobility},
        {"claimed", mob.claimed ? Json(*mob.claimed) : Json(nullptr)},
        {"warnings", mob.warnings}}},
      {"kinematics",
       {{"slider_speed_m_s", in.slider_speed},
        {"direction", in.direction_name},
        {"profile_steps", in.steps},
        {"samples", profile.time.size()},
        {"tracked_point", std::string(1, in.tracked)},
        {"profile_duration_s", profile.total_duration},
        {"deploy_leg_duration_s", leg},
        {"peak_linear_velocity", peak(curves.linear_velocity)},
        {"peak_angular_velocity", peak(curves.angular_velocity)},
        {"peak_linear_acceleration", peak(curves.linear_acceleration)},
        {"peak_angular_acceleration", peak(curves.angular_acceleration)},
        {"reference_deployment_times", time_rows}}},
      {"dynamics",
       {{"mass", dp.mass},
        {"stiffness", dp.stiffness},
        {"gravity", dp.gravity},
        {"ring_radius_m", dp.ring_radius},
        {"unit_length_m", dp.unit_length},
        {"omega_n_rad_s", nf.omega},
        {"f_n_hz", nf.hertz},
        {"degenerate", nf.degenerate},
        {"equilibrium_angle_rad", equilibrium_angle(dp)},
        {"simulation",
         {{"theta0_rad", in.theta0},
          {"dt_s", dt},
          {"periods", in.periods},
          {"samples", traj.size()},
          {"max_relative_energy_drift", drift}}}}},
      {"reference_comparison", {{"flag_threshold", cmp.flag_threshold}, {"rows", cmp_rows}}},
      {"existing_antennas", antenna_rows},
      {"warnings", bundle.warnings}};

  Artifacts out;
  out.add("analysis.json", dump(report));
  out.add("profile.csv", to_csv(prof));
  out.add("curves.csv", to_csv(curve_csv));
  out.add("trajectory.csv", to_csv(trajectory));
  out.add("comparison.csv", to_csv(comparison));
  const std::array<std::pair<const char*, const std::vector<double>*>, 4> plots{{
      {"linear_velocity", &curves.linear_velocity},
      {"angular_velocity", &curves.angular_velocity},
      {"linear_acceleration", &curves.linear_acceleration},
      {"angular_acceleration", &curves.angular_acceleration},
  }};
  const std::array<const char*, 4> units{"m/s", "rad/s", "m/s^2", "rad/s^2"};
  for (std::size_t i = 0; i < plots.size(); ++i) {
    LinePlot plot;
    plot.title = fmt::format("{} of point {}", plots[i].first, in.tracked);
    plot.x_label = "t (s)";
    plot.y_label = units[i];
    plot.x = curves.time;
    plot.y = *plots[i].second;
    out.add(fmt::format("{}.svg", plots[i].first), render_svg(plot));
  }
  out.flush(ctx.out_dir, bundle);

  bundle.summary = fmt::format(
      "mobility M = {} (links {}, lower pairs {}, higher pairs {})\n"
      "omega_n = {:.5f} rad/s, f_n = {:.5f} Hz\n"
      "deploy leg at {:g} m/s: {:.4g} s; profile samples: {}\n"
      "max relative energy drift over {:g} periods: {:.3g}\n",
      mob.mobility, mob.count.links, mob.count.lower_pairs, mob.count.higher_pairs, nf.omega,
      nf.hertz, in.slider_speed, leg, profile.time.size(), in.periods, drift);
  return bundle;
}

// ---------------------------------------------------------------------------
// material
// ---------------------------------------------------------------------------

ReportBundle cmd_material(const Json& config, const RunContext& ctx) {
  ConfigObject c(config, "");
  c.allow_only({"materials_csv", "t_max_req", "t_min_req", "weights"});
  fs::path db_path = ctx.data_dir / "materials.csv";
  if (c.has("materials_csv")) {
    db_path = c.string("materials_csv", "");
    if (db_path.is_relative()) db_path = ctx.config_dir / db_path;
  }
  ThermalRequirement req;
  req.max_required = c.number("t_max_req", req.max_required);
  req.min_required = c.number("t_min_req", req.min_required);
  const ConfigObject w = c.object("weights");
  w.allow_only({"tensile", "modulus", "density"});
  ScoreWeights weights;
  weights.tensile = w.number("tensile", weights.tensile);
  weights.modulus = w.number("modulus", weights.modulus);
  weights.density = w.number("density", weights.density);

  const std::vector<MaterialRecord> db = load_materials(db_path);
  SelectionReport rep;
  try {
    rep = select_material(db, req, weights);
  } catch (const std::domain_error& e) {
    throw InfeasibleError(fmt::format("no candidate material: {}", e.what()));
  }

  ReportBundle bundle;
  bundle.warnings = rep.notes;
  CsvTable scores;
  scores.header = {"rank", "material", "score", "tensile_term", "modulus_term", "density_term"};
  Json ranked = Json::array();
  for (std::size_t i = 0; i < rep.ranked.size(); ++i) {
    const MaterialScore& s = rep.ranked[i];
    scores.rows.push_back({std::to_string(i + 1), s.name, csv_number(s.score),
                           csv_number(s.tensile_term), csv_number(s.modulus_term),
                           csv_number(s.density_term)});
    ranked.push_back(Json{{"material", s.name},
                          {"score", s.score},
                          {"tensile_term", s.tensile_term},
                          {"modulus_term", s.modulus_term},
                          {"density_term", s.density_term}});
  }
  Json suitable = Json::array();
  for (const FilteredMaterial& f : rep.suitable) {
    suitable.push_back(Json{{"material", f.record.name},
                            {"max_temperature_c", f.record.max_temperature},
                            {"min_temperature_unverified", f.min_temperature_unverified}});
  }
  Json classifier = nullptr;
  if (rep.classifier) {
    const ClassifierModel& m = *rep.classifier;
    Json predictions = Json::object();
    for (std::size_t i = 0; i < db.size() && i < m.predictions.size(); ++i) {
      predictions[db[i].name] = m.predictions[i];
    }
    classifier = Json{{"weights", m.weights},
                      {"bias", m.bias},
                      {"training_accuracy", m.training_accuracy},
                      {"margin", m.margin},
                      {"iterations", m.iterations},
                      {"predictions", predictions}};
  }
  Json report{{"winner", rep.winner.name},
              {"requirements", {{"t_max_req", req.max_required}, {"t_min_req", req.min_required}}},
              {"weights",
               {{"tensile", weights.tensile}, {"modulus", weights.modulus}, {"density", weights.density}}},
              {"database_size", db.size()},
              {"ranked", ranked},
              {"suitable", suitable},
              {"excluded", rep.excluded},
              {"classifier", classifier},
              {"notes", rep.notes}};

  Artifacts out;
  out.add("material_selection.json", dump(report));
  out.add("material_scores.csv", to_csv(scores));
  out.flush(ctx.out_dir, bundle);

  bundle.summary = fmt::format("winner: {} (score {:.4f}); {} of {} materials pass the thermal filter\n",
                               rep.winner.name, rep.ranked.front().score, rep.suitable.size(),
                               db.size());
  if (rep.classifier) {
    bundle.summary += fmt::format("classifier training accuracy: {:.3f}\n",
                                  rep.classifier->training_accuracy);
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

ReportBundle cmd_optimize(const Json& config, const RunContext& ctx) {
  const OptimizeInput in = read_optimize_input(config, ctx);
  ReportBundle bundle;
  Artifacts out;
  std::string summary;

  if (in.run_surrogate) {
    const SurrogateInput& si = in.surrogate;
    const AntennaDesign d = make_design(si.aperture, si.unit_count, true);
    const CurveDataset data =
        normalize_dataset(kinematic_dataset(d.unit, si.slider_speed, si.samples - 1));
    const SurrogateFit fit = fit_kinematics_surrogate(data, si.options);
    bundle.warnings.insert(bundle.warnings.end(), fit.warnings.begin(), fit.warnings.end());

    Json runs = Json::array();
    for (const RunRecord& r : fit.runs) {
      Json curves = Json::object();
      for (std::size_t c = 0; c < kCurveCount; ++c) {
        const CurveFitRecord& cr = r.curves[c];
        curves[kCurveNames[c]] = Json{{"ga_fitness", cr.ga_fitness},
                                      {"refined_fitness", cr.refined_fitness},
                                      {"ga_generations", cr.ga_generations},
                                      {"ga_function_evals", cr.ga_function_evals},
                                      {"refine_iterations", cr.refine_iterations},
                                      {"refine_function_evals", cr.refine_function_evals},
                                      {"refine_status", cr.refine_status}};
      }
      runs.push_back(Json{{"run", r.run}, {"curves", curves}});
    }
    Json best = Json::object();
    for (std::size_t c = 0; c < kCurveCount; ++c) {
      best[kCurveNames[c]] = Json{{"mse", fit.best_fitness[c]}, {"run", fit.best_run[c]}};
    }
    Json report{{"dataset",
                 {{"aperture_m", si.aperture},
                  {"unit_count", si.unit_count},
                  {"slider_speed_m_s", si.slider_speed},
                  {"samples", data.t.size()},
                  {"normalized", true}}},
                {"ga", ga_json(si.options.ga)},
                {"refine", refine_json(si.options.refine)},
                {"runs_requested", si.options.runs},
                {"weight_bound", si.options.weight_bound},
                {"best", best},
                {"chromosome", chromosome_json(fit.best)},
                {"runs", runs},
                {"warnings", fit.warnings}};
    out.add("surrogate_fit.json", dump(report));

    CsvTable trace;
    trace.header = {"generation"};
    std::size_t len = 0;
    for (std::size_t c = 0; c < kCurveCount; ++c) {
      trace.header.push_back(kCurveNames[c]);
      len = std::max(len, fit.ga_traces[c].size());
    }
    for (std::size_t g = 0; g < len; ++g) {
      std::vector<std::string> row{std::to_string(g)};
      for (std::size_t c = 0; c < kCurveCount; ++c) {
        row.push_back(g < fit.ga_traces[c].size() ? csv_number(fit.ga_traces[c][g]) : "");
      }
      trace.rows.push_back(std::move(row));
    }
    out.add("surrogate_trace.csv", to_csv(trace));

    summary += "surrogate final MSE (normalized curves):";
    for (std::size_t c = 0; c < kCurveCount; ++c) {
      summary += fmt::format(" {} {:.3e}", kCurveNames[c], fit.best_fitness[c]);
    }
    summary += "\n";
  }

  std::optional<std::string> infeasible;
  if (in.run_geometry) {
    const GeometryProblem& p = in.geometry.problem;
    const GeometryResult g = optimize_geometry(p);
    bundle.warnings.insert(bundle.warnings.end(), g.warnings.begin(), g.warnings.end());

    Json constraints = Json::array();
    for (const ConstraintCheck& c : g.constraints) {
      constraints.push_back(Json{{"name", c.name}, {"value", c.value}, {"satisfied", c.satisfied}});
    }
    const FrequencyComparison cmp =
        compare_frequency(kReferenceGeometry.frequency_hz, kReferenceGeometry.simulated_hz);
    Json scales = Json::object();
    for (std::size_t i = 0; i < kLinkGroupCount; ++i) scales[kLinkGroupNames[i]] = g.point.scales[i];

    Json report{
        {"problem",
         {{"baseline_aperture_m", p.baseline.aperture},
          {"unit_count", p.baseline.unit_count},
          {"stiffness", p.stiffness},
          {"mass_model",
           {{"enabled", p.mass.enabled},
            {"linear_density", p.mass.linear_density},
            {"fixed_mass", p.mass.fixed_mass}}},
          {"r_min", p.r_min},
          {"r_max", optional_json(p.r_max)},
          {"f_lo", p.f_lo},
          {"f_hi", p.f_hi},
          {"scale_lo", p.scale_lo},
          {"scale_hi", p.scale_hi},
          {"refine", refine_json(p.refine)}}},
        {"result",
         {{"radius_m", g.point.radius},
          {"aperture_m", g.design.aperture},
          {"scales", scales},
          {"frequency_hz", g.frequency_hz},
          {"baseline_frequency_hz", g.baseline_frequency_hz},
          {"unit_mass", g.mass},
          {"unit", unit_json(g.design.unit)},
          {"constraints", constraints},
          {"feasible", g.feasible},
          {"infeasible_window", g.infeasible_window},
          {"flat_objective", g.flat_objective},
          {"converged", g.converged},
          {"status", g.status},
          {"iterations", g.iterations},
          {"function_evals", g.function_evals},
          {"objective_trace_hz", g.objective_trace},
          {"log", g.log},
          {"warnings", g.warnings}}},
        {"reference_design",
         {{"note", "published outcome of a surrogate-driven optimization; comparison only"},
          {"radius_m", kReferenceGeometry.radius},
          {"frequency_hz", kReferenceGeometry.frequency_hz},
          {"simulated_hz", kReferenceGeometry.simulated_hz},
          {"original_lengths_m", kReferenceGeometry.original_lengths},
          {"optimized_lengths_m", kReferenceGeometry.optimized_lengths},
          {"comparison",
           {{"predicted_hz", cmp.predicted_hz},
            {"simulated_hz", cmp.simulated_hz},
            {"absolute_difference_hz", cmp.absolute_difference},
            {"relative_difference", cmp.relative_difference}}}}}};
    out.add("geometry_result.json", dump(report));

    CsvTable trace;
    trace.header = {"iteration", "frequency_hz"};
    for (std::size_t i = 0; i < g.objective_trace.size(); ++i) {
      trace.rows.push_back({std::to_string(i), csv_number(g.objective_trace[i])});
    }
    out.add("geometry_trace.csv", to_csv(trace));

    if (g.infeasible_window) {
      infeasible = g.warnings.empty() ? std::string("frequency window infeasible") : g.warnings.back();
    } else {
      std::size_t ok = 0;
      for (const ConstraintCheck& c : g.constraints) ok += c.satisfied ? 1 : 0;
      summary += fmt::format(
          "geometry: R = {:.4f} m, f_n = {:.6f} Hz (baseline {:.6f} Hz), {} of {} constraints "
          "satisfied, status {}\n",
          g.point.radius, g.frequency_hz, g.baseline_frequency_hz, ok, g.constraints.size(),
          g.status);
      if (g.flat_objective) summary += "geometry: flat objective, nothing optimized\n";
    }
    summary += fmt::format(
        "reference design: predicted {:g} Hz vs simulated {:g} Hz, relative difference {:.2f}%\n",
        cmp.predicted_hz, cmp.simulated_hz, 100.0 * cmp.relative_difference);
  }

  out.flush(ctx.out_dir, bundle);
  bundle.summary = summary;
  if (infeasible) throw InfeasibleError(*infeasible);
  return bundle;
}

// ---------------------------------------------------------------------------

int run(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  try {
    Json config = Json::object();
    fs::path config_dir = fs::current_path();
    if (rc.config_path) {
      const std::string text = read_text(*rc.config_path);
      config = parse_config(text, rc.config_path->string());
      config_dir = fs::absolute(*rc.config_path).parent_path();
    }
    const RunContext ctx{rc.out_dir, default_data_dir(), config_dir, rc.seed};

    ReportBundle bundle;
    if (rc.subcommand == "design") {
      bundle = cmd_design(config, ctx);
    } else if (rc.subcommand == "analyze") {
      bundle = cmd_analyze(config, ctx);
    } else if (rc.subcommand == "material") {
      bundle = cmd_material(config, ctx);
    } else if (rc.subcommand == "optimize") {
      bundle = cmd_optimize(config, ctx);
    } else {
      throw ConfigError(fmt::format("unknown subcommand '{}'", rc.subcommand));
    }
    if (!rc.quiet) {
      out << bundle.summary;
      for (const auto& p : bundle.paths) out << "wrote " << p.string() << "\n";
    }
    for (const auto& w : bundle.warnings) err << "warning: " << w << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::domain_error& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::out_of_range& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace scissortruss::cli
