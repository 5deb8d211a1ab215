#ifndef RATESCALE_EXPERIMENTS_HPP
#define RATESCALE_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ratescale/baseline.hpp"
#include "ratescale/solver.hpp"

#include <nlohmann/json_fwd.hpp>

namespace ratescale {

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
  std::uint64_t total() const { return tp + fp + tn + fn; }
};

enum class ConfusionLabel { tp, fp, tn, fn };

struct CostHistogramRow {
  double energy = 0.0;
  ConfusionLabel label;
  Partition partition;
};

struct ConfusionOptions {
  /// Cost weights; defaults to preset set 1 for the instance's (n, m, d).
  std::optional<PenaltyWeights> weights;
  std::uint64_t max_configurations = 1'000'000;
  double tie_rel_tol = 1e-9; // argmin tie detection
  int threads = 0;           // 0 = library default, 1 = serial reference
};

struct ConfusionResult {
  ConfusionMatrix matrix;
  std::vector<CostHistogramRow> rows; // enumeration order
  double min_energy = 0.0;

  nlohmann::json to_json() const;
  std::string histogram_csv() const; // `energy,label`
};

/// Validation study for the approximate monotonicity penalty: enumerate
/// every staircase assignment, label it actual-positive when the default
/// rates are monotone, evaluate the logical+monotonicity cost on it, and
/// take the argmin set as predicted-positive.
ConfusionResult monotonicity_confusion(const Dataset& ds, int m,
                                       const ConfusionOptions& options = {});

struct PresetExperimentReport {
  SolveResult result;
  int preset = 0;

  nlohmann::json to_json() const;
  /// Aligned text table: grade id, cardinality, defaults, default rate.
  std::string grade_table() const;
};

/// End-to-end run with preset weights: build, solve, decode, validate.
PresetExperimentReport run_preset_experiment(int n, int m,
                                             const std::vector<int>& default_positions,
                                             int preset_id,
                                             const SolveAndValidateOptions& options = {});

struct RuntimeExtrapolation {
  double log10_seconds = 0.0;
  double seconds = 0.0;
  double days = 0.0;
};

/// a * binomial(n-1, m-1)^b, evaluated in log space.
RuntimeExtrapolation extrapolate_runtime(double a, double b, int n, int m);

} // namespace ratescale

#endif
