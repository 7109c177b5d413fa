#include "scissortruss/materials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace scissortruss {

void MaterialRecord::validate() const {
  const auto positive = [&](double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(name + ": " + what + " must be positive");
  };
  if (name.empty()) throw std::invalid_argument("material name is empty");
  positive(youngs_modulus, "Young's modulus");
  positive(density, "density");
  positive(poissons_ratio, "Poisson's ratio");
  positive(cte, "CTE");
  positive(yield_strength, "yield strength");
  positive(tensile_strength, "tensile strength");
  positive(ultimate_strength, "ultimate strength");
  positive(elastic_limit, "elastic limit");
  positive(breaking_strength, "breaking strength");
  positive(max_temperature, "max temperature");
  if (!(yield_strength <= tensile_strength && tensile_strength <= ultimate_strength)) {
    throw std::invalid_argument(name + ": expected yield <= tensile <= ultimate");
  }
}

bool passes_thermal(const MaterialRecord& m, const ThermalRequirement& req) {
  if (m.max_temperature < req.max_required) return false;
  return !m.min_temperature || *m.min_temperature <= req.min_required;
}

std::vector<FilteredMaterial> thermal_filter(const std::vector<MaterialRecord>& db,
                                             const ThermalRequirement& req) {
  std::vector<FilteredMaterial> out;
  for (const MaterialRecord& m : db) {
    if (passes_thermal(m, req)) out.push_back({m, !m.min_temperature.has_value()});
  }
  return out;
}

const FeatureRow& FeatureMatrix::row(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return rows[i];
  }
  throw std::out_of_range("material not in feature set: " + name);
}

namespace {

FeatureRow raw_features(const MaterialRecord& m) {
  return {m.tensile_strength, m.youngs_modulus, m.density};
}

// Constant columns map to 0 when `strict` is off.
FeatureMatrix normalize(const std::vector<MaterialRecord>& db, bool strict) {
  if (db.empty() || (strict && db.size() < 2)) {
    throw std::domain_error("normalisation needs at least two materials");
  }
  FeatureMatrix fm;
  fm.min.fill(std::numeric_limits<double>::infinity());
  fm.max.fill(-std::numeric_limits<double>::infinity());
  for (const MaterialRecord& m : db) {
    const FeatureRow r = raw_features(m);
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      fm.min[k] = std::min(fm.min[k], r[k]);
      fm.max[k] = std::max(fm.max[k], r[k]);
    }
  }
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    if (strict && !(fm.max[k] > fm.min[k])) {
      throw std::domain_error("feature column " + std::to_string(k) + " has zero range");
    }
  }
  for (const MaterialRecord& m : db) {
    const FeatureRow r = raw_features(m);
    FeatureRow n{};
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const double range = fm.max[k] - fm.min[k];
      n[k] = range > 0.0 ? (r[k] - fm.min[k]) / range : 0.0;
    }
    fm.names.push_back(m.name);
    fm.rows.push_back(n);
  }
  return fm;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

FeatureMatrix normalize_features(const std::vector<MaterialRecord>& db) {
  return normalize(db, true);
}

int ClassifierModel::predict(const std::vector<double>& x) const {
  return dot(weights, x) + bias >= 0.0 ? 1 : -1;
}

ClassifierModel train_classifier(const std::vector<std::vector<double>>& features,
                                 const std::vector<int>& labels, const SvmOptions& opts) {
  const std::size_t n = features.size();
  if (n != labels.size()) throw std::invalid_argument("feature/label count mismatch");
  if (n == 0) throw std::invalid_argument("no training data");
  const std::size_t dim = features.front().size();
  bool has_pos = false;
  bool has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].size() != dim) throw std::invalid_argument("ragged feature rows");
    if (labels[i] == 1) {
      has_pos = true;
    } else if (labels[i] == -1) {
      has_neg = true;
    } else {
      throw std::invalid_argument("labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("training needs both classes");

  // Dual: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, with Q_ij = y_i y_j x_i.x_j.
  std::vector<double> kernel(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) kernel[i * n + j] = dot(features[i], features[j]);
  }
  const auto y = [&](std::size_t i) { return static_cast<double>(labels[i]); };
  const auto q = [&](std::size_t i, std::size_t j) { return y(i) * y(j) * kernel[i * n + j]; };
  const double c = opts.box;
  constexpr double kTau = 1e-12;

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  const auto in_up = [&](std::size_t t) {
    return (labels[t] == 1 && alpha[t] < c) || (labels[t] == -1 && alpha[t] > 0.0);
  };
  const auto in_low = [&](std::size_t t) {
    return (labels[t] == 1 && alpha[t] > 0.0) || (labels[t] == -1 && alpha[t] < c);
  };

  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    // Maximal violating pair.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y(t) * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin < opts.tolerance) break;

    const double ai = alpha[i];
    const double aj = alpha[j];
    if (labels[i] != labels[j]) {
      double quad = kernel[i * n + i] + kernel[j * n + j] + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = kernel[i * n + i] + kernel[j * n + j] - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - ai;
    const double dj = alpha[j] - aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
  }

  // Offset from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y(t) * grad[t];
    if (alpha[t] >= c) {
      if (labels[t] == -1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (alpha[t] <= 0.0) {
      if (labels[t] == 1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);

  ClassifierModel model;
  model.iterations = iter;
  model.weights.assign(dim, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < dim; ++k) model.weights[k] += alpha[t] * y(t) * features[t][k];
  }
  model.bias = -rho;

  const double wnorm = std::sqrt(dot(model.weights, model.weights));
  int correct = 0;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const int p = model.predict(features[t]);
    model.predictions.push_back(p);
    if (p == labels[t]) ++correct;
    const double f = dot(model.weights, features[t]) + model.bias;
    margin = std::min(margin, wnorm > 0.0 ? y(t) * f / wnorm : 0.0);
  }
  model.training_accuracy = static_cast<double>(correct) / static_cast<double>(n);
  model.margin = margin;
  return model;
}

MaterialScore score_material(const std::string& name, const FeatureMatrix& features,
                             const ScoreWeights& weights) {
  const FeatureRow& r = features.row(name);
  MaterialScore s;
  s.name = name;
  s.tensile_term = weights.tensile * r[0];
  s.modulus_term = weights.modulus * r[1];
  s.density_term = 0.0 - weights.density * r[2];
  s.score = s.tensile_term + s.modulus_term + s.density_term;
  return s;
}

SelectionReport select_material(const std::vector<MaterialRecord>& db,
                                const ThermalRequirement& req, const ScoreWeights& weights) {
  if (db.empty()) throw std::domain_error("material database is empty");
  SelectionReport report;
  report.suitable = thermal_filter(db, req);
  for (const MaterialRecord& m : db) {
    if (!passes_thermal(m, req)) report.excluded.push_back(m.name);
  }
  if (report.suitable.empty()) {
    throw std::domain_error(fmt::format(
        "no material meets the thermal requirement (max >= {:g} C, min <= {:g} C)",
        req.max_required, req.min_required));
  }
  for (const FilteredMaterial& f : report.suitable) {
    if (f.min_temperature_unverified) {
      report.notes.push_back(f.record.name + ": minimum temperature unverified");
    }
  }

  const FeatureMatrix features = normalize(db, false);
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    if (!(features.max[k] > features.min[k])) {
      report.notes.push_back("feature column " + std::to_string(k) + " is constant; scored as 0");
    }
  }

  std::vector<std::vector<double>> x;
  std::vector<int> labels;
  for (std::size_t i = 0; i < db.size(); ++i) {
    x.emplace_back(features.rows[i].begin(), features.rows[i].end());
    labels.push_back(passes_thermal(db[i], req) ? 1 : -1);
  }
  if (report.excluded.empty()) {
    report.notes.push_back("classifier skipped: every material is thermally suitable");
  } else {
    report.classifier = train_classifier(x, labels);
  }

  for (const FilteredMaterial& f : report.suitable) {
    report.ranked.push_back(score_material(f.record.name, features, weights));
  }
  std::sort(report.ranked.begin(), report.ranked.end(),
            [](const MaterialScore& a, const MaterialScore& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.name < b.name;
            });
  const std::string& best = report.ranked.front().name;
  for (const FilteredMaterial& f : report.suitable) {
    if (f.record.name == best) report.winner = f.record;
  }
  return report;
}

}  // namespace scissortruss
