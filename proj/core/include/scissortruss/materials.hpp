#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace scissortruss {

enum class FailureMode { kDuctile, kBrittle };

struct MaterialRecord {
  std::string name;
  double youngs_modulus = 0.0;   // GPa
  double density = 0.0;          // g/cm^3
  double poissons_ratio = 0.0;
  double cte = 0.0;              // um/(m C)
  double yield_strength = 0.0;   // MPa
  double tensile_strength = 0.0; // MPa
  double ultimate_strength = 0.0;
  double elastic_limit = 0.0;
  double breaking_strength = 0.0;
  FailureMode failure_mode = FailureMode::kBrittle;
  double max_temperature = 0.0;  // C
  std::optional<double> min_temperature;

  /// Throws std::invalid_argument on non-positive properties or when
  /// yield <= tensile <= ultimate does not hold.
  void validate() const;
};

struct ThermalRequirement {
  double max_required = 150.0;
  double min_required = -100.0;
};

struct FilteredMaterial {
  MaterialRecord record;
  bool min_temperature_unverified = false;
};

/// Keeps materials rated to at least the required maximum temperature and,
/// where data exists, down to the required minimum. Records without a
/// minimum pass with `min_temperature_unverified` set.
std::vector<FilteredMaterial> thermal_filter(const std::vector<MaterialRecord>& db,
                                             const ThermalRequirement& req = {});

bool passes_thermal(const MaterialRecord& m, const ThermalRequirement& req = {});

/// Feature columns: tensile strength, Young's modulus, density.
inline constexpr std::size_t kFeatureCount = 3;
using FeatureRow = std::array<double, kFeatureCount>;

struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<FeatureRow> rows;
  FeatureRow min{};
  FeatureRow max{};

  const FeatureRow& row(const std::string& name) const;
};

/// Min-max normalisation of each feature column over `db`. Throws
/// std::domain_error for fewer than two materials or a constant column.
FeatureMatrix normalize_features(const std::vector<MaterialRecord>& db);

// ---------------------------------------------------------------------------
// Linear max-margin classifier
// ---------------------------------------------------------------------------

struct ClassifierModel {
  std::vector<double> weights;
  double bias = 0.0;
  double training_accuracy = 0.0;
  // Smallest signed distance y (w.x + b) / |w| over the training set;
  // negative when the data are not separated.
  double margin = 0.0;
  int iterations = 0;
  std::vector<int> predictions;  // +1 / -1 per training row

  int predict(const std::vector<double>& x) const;
};

struct SvmOptions {
  double box = 1e4;  // soft-margin C; large values approach the hard margin
  double tolerance = 1e-10;
  int max_iterations = 100000;
};

/// Trains w, b by SMO on the dual of the soft-margin SVM with a linear
/// kernel. Labels are +1 / -1. Throws std::invalid_argument when only one
/// class is present or shapes disagree.
ClassifierModel train_classifier(const std::vector<std::vector<double>>& features,
                                 const std::vector<int>& labels, const SvmOptions& opts = {});

// ---------------------------------------------------------------------------
// Scoring and selection
// ---------------------------------------------------------------------------

struct ScoreWeights {
  double tensile = 1.0;
  double modulus = 1.0;
  double density = 1.0;
};

struct MaterialScore {
  std::string name;
  double score = 0.0;
  double tensile_term = 0.0;
  double modulus_term = 0.0;
  double density_term = 0.0;  // already negated
};

/// score = w1 tensile^ + w2 modulus^ - w3 density^. Throws std::out_of_range
/// when the name is not in the feature matrix.
MaterialScore score_material(const std::string& name, const FeatureMatrix& features,
                             const ScoreWeights& weights = {});

struct SelectionReport {
  MaterialRecord winner;
  std::vector<MaterialScore> ranked;  // suitable materials, best first
  std::vector<FilteredMaterial> suitable;
  std::vector<std::string> excluded;
  std::optional<ClassifierModel> classifier;
  std::vector<std::string> notes;
};

/// Filter, normalise over the whole table, train the advisory classifier on
/// the thermal labels, score the suitable rows and pick the best (ties broken
/// by name). Throws std::domain_error when nothing passes the filter.
SelectionReport select_material(const std::vector<MaterialRecord>& db,
                                const ThermalRequirement& req = {},
                                const ScoreWeights& weights = {});

}  // namespace scissortruss
