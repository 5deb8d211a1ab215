#include "ratescale/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "parallel.hpp"

namespace ratescale {

namespace {

const char* label_name(ConfusionLabel label) {
  switch (label) {
    case ConfusionLabel::tp: return "TP";
    case ConfusionLabel::fp: return "FP";
    case ConfusionLabel::tn: return "TN";
    case ConfusionLabel::fn: return "FN";
  }
  return "?";
}

} // namespace

ConfusionResult monotonicity_confusion(const Dataset& ds, int m,
                                       const ConfusionOptions& options) {
  const int n = ds.n();
  const BigUint configurations = count_configurations(n, m);
  if (configurations > BigUint(options.max_configurations))
    throw std::invalid_argument(
        "monotonicity_confusion: " + configurations.str() +
        " staircase configurations exceed the cap of " +
        std::to_string(options.max_configurations));
  const std::uint64_t total = configurations.convert_to<std::uint64_t>();

  const PenaltyWeights weights = options.weights.value_or(
      preset_weights(1, n, m, std::max(1, ds.default_count())));

  LayoutOptions layout_options;
  layout_options.include_thresholds = false;
  const VariableLayout layout = VariableLayout::create(n, m, layout_options);
  QuboBuilder builder(layout.total_variables());
  builder.add_model(penalty_logical_global(layout, weights));
  builder.add_model(penalty_monotonicity_approx(layout, ds, weights.mu1));
  const QuboModel model = builder.build();

  struct Entry {
    double energy;
    bool actual_positive;
  };
  std::vector<Entry> entries(total);
  std::vector<std::vector<int>> compositions(total);

  const int threads = detail::resolve_threads(options.threads);
  if (threads == 1) {
    // Serial reference path.
    CompositionEnumerator enumerator(n, m);
    std::vector<int> parts;
    std::uint64_t rank = 0;
    while (enumerator.next(parts)) {
      const Partition p(parts);
      const auto state = partition_to_state(p, layout);
      entries[rank] = {model.evaluate(state),
                       check_monotonicity(grade_stats(ds, p))};
      compositions[rank] = parts;
      ++rank;
    }
  } else {
    const std::uint64_t chunk_count =
        std::min<std::uint64_t>(total, static_cast<std::uint64_t>(threads) * 8);
    const std::uint64_t chunk_size = (total + chunk_count - 1) / chunk_count;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunk_count); ++c) {
      const std::uint64_t begin = c * chunk_size;
      const std::uint64_t end = std::min<std::uint64_t>(total, begin + chunk_size);
      if (begin >= end) continue;
      std::vector<int> parts = CompositionEnumerator::unrank(n, m, begin);
      for (std::uint64_t rank = begin; rank < end; ++rank) {
        const Partition p(parts);
        const auto state = partition_to_state(p, layout);
        entries[rank] = {model.evaluate(state),
                         check_monotonicity(grade_stats(ds, p))};
        compositions[rank] = parts;
        if (rank + 1 < end) next_composition(parts);
      }
    }
  }

  double min_energy = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) min_energy = std::min(min_energy, e.energy);
  const double tol =
      options.tie_rel_tol * std::max(1.0, std::abs(min_energy));

  ConfusionResult result;
  result.min_energy = min_energy;
  result.rows.reserve(total);
  for (std::uint64_t rank = 0; rank < total; ++rank) {
    const bool predicted_positive = entries[rank].energy <= min_energy + tol;
    const bool actual_positive = entries[rank].actual_positive;
    ConfusionLabel label;
    if (predicted_positive)
      label = actual_positive ? ConfusionLabel::tp : ConfusionLabel::fp;
    else
      label = actual_positive ? ConfusionLabel::fn : ConfusionLabel::tn;
    switch (label) {
      case ConfusionLabel::tp: ++result.matrix.tp; break;
      case ConfusionLabel::fp: ++result.matrix.fp; break;
      case ConfusionLabel::tn: ++result.matrix.tn; break;
      case ConfusionLabel::fn: ++result.matrix.fn; break;
    }
    result.rows.push_back(
        {entries[rank].energy, label, Partition(compositions[rank])});
  }
  return result;
}

nlohmann::json ConfusionResult::to_json() const {
  return {{"tp", matrix.tp},
          {"fp", matrix.fp},
          {"tn", matrix.tn},
          {"fn", matrix.fn},
          {"total", matrix.total()},
          {"min_energy", min_energy}};
}

std::string ConfusionResult::histogram_csv() const {
  std::ostringstream out;
  out << "energy,label\n";
  out.precision(17);
  for (const auto& row : rows)
    out << row.energy << ',' << label_name(row.label) << '\n';
  return out.str();
}

PresetExperimentReport run_preset_experiment(int n, int m,
                                             const std::vector<int>& default_positions,
                                             int preset_id,
                                             const SolveAndValidateOptions& options) {
  const Dataset ds = Dataset::from_default_positions(n, default_positions);
  SolveAndValidateOptions run = options;
  run.preset = preset_id;
  PresetExperimentReport report;
  report.preset = preset_id;
  report.result = solve_and_validate(ds, m, run);
  return report;
}

nlohmann::json PresetExperimentReport::to_json() const {
  nlohmann::json j = result.to_json();
  j["preset"] = preset;
  return j;
}

std::string PresetExperimentReport::grade_table() const {
  std::ostringstream out;
  out << "Grade  Cardinality  Defaults  Default rate\n";
  if (!result.validity) {
    out << "(no decoded partition)\n";
    return out.str();
  }
  const auto& grades = result.validity->grades;
  for (std::size_t g = 0; g < grades.size(); ++g)
    out << std::setw(5) << (g + 1) << "  " << std::setw(11)
        << grades[g].cardinality << "  " << std::setw(8)
        << grades[g].default_count << "  " << std::fixed << std::setprecision(6)
        << std::setw(12) << grades[g].default_rate << '\n';
  return out.str();
}

RuntimeExtrapolation extrapolate_runtime(double a, double b, int n, int m) {
  if (!(a > 0.0)) throw std::invalid_argument("extrapolate: a must be > 0");
  const double log_seconds = std::log(a) + b * log_count_configurations(n, m);
  RuntimeExtrapolation r;
  r.log10_seconds = log_seconds / std::numbers::ln10;
  r.seconds = std::exp(log_seconds);
  r.days = std::exp(log_seconds - std::log(86400.0));
  return r;
}

} // namespace ratescale
