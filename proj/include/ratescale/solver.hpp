#ifndef RATESCALE_SOLVER_HPP
#define RATESCALE_SOLVER_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ratescale/penalties.hpp"
#include "ratescale/qubo.hpp"
#include "ratescale/scale.hpp"

#include <nlohmann/json_fwd.hpp>

namespace ratescale {

/// Adjacency (CSR) view of a QuboModel for the solver hot loops: O(degree)
/// single-flip energy deltas. Each quadratic pair is stored in both rows.
class CompiledQubo {
public:
  explicit CompiledQubo(const QuboModel& model);

  int dimension() const { return dimension_; }
  double offset() const { return offset_; }

  double evaluate(std::span<const std::uint8_t> state) const;

  /// evaluate(state with bit `flip` toggled) - evaluate(state).
  double delta_energy(std::span<const std::uint8_t> state, int flip) const;

  int degree(int i) const { return adj_offset_[i + 1] - adj_offset_[i]; }

private:
  int dimension_ = 0;
  double offset_ = 0.0;
  std::vector<double> linear_;
  std::vector<int> adj_offset_;
  std::vector<int> adj_index_;
  std::vector<double> adj_coeff_;
};

struct AnnealSchedule {
  double t_start = 0.0;   // 0 = estimate for ~0.8 initial acceptance
  double t_end = 0.0;     // 0 = 1e-3 * t_start
  long long sweeps = 0;   // 0 = 10 * dimension; one sweep = dimension attempts
};

struct SolveOptions {
  int exact_cap = 26;             // refuse exhaustive scans beyond this
  AnnealSchedule schedule;
  int restarts = 8;
  std::uint64_t seed = 0;
  int threads = 0;                // 0 = library default, 1 = serial
  std::size_t max_minimizers = std::size_t{1} << 20;

  /// One-hot variable groups (e.g. the m assignment bits of one counterpart).
  /// When set, the annealer keeps each group at exactly one set bit and moves
  /// by reassignment instead of single flips; plain bit flips still drive all
  /// ungrouped variables. Pure single-bit annealing cannot cross the
  /// uniqueness barrier between staircases once the rows freeze, so the
  /// composed rating-scale models are solved with their rows grouped.
  std::vector<std::vector<int>> one_hot_groups;

  /// Warm starts, cycled across restarts. A cold quench of the grouped model
  /// freezes into multi-winding label sequences that cannot unwind below the
  /// adjacency-bond scale, so the composed models are started from random
  /// staircases and annealed below that scale instead.
  std::vector<std::vector<std::uint8_t>> initial_states;
};

struct DecodeFailure {
  enum class Reason {
    length_mismatch,
    row_cardinality,        // a row with zero or several set bits
    wrong_endpoints,        // first row not grade 1 or last row not grade m
    empty_grade,            // a grade index skipped by an upward jump
    column_order,           // a grade block appearing after a later grade
    non_contiguous_column,  // a grade's rows split into separate blocks
  };
  Reason reason;
  std::string message;
};

struct DecodeResult {
  std::optional<Partition> partition;
  std::optional<DecodeFailure> failure;
  bool ok() const { return partition.has_value(); }
};

/// Reads the x block of `state` as a binary staircase matrix and returns the
/// grade cardinalities, or a named structural diagnosis. Slack bits are
/// ignored.
DecodeResult decode(std::span<const std::uint8_t> state,
                    const VariableLayout& layout);

struct SolveSample {
  std::vector<std::uint8_t> state;
  double energy = 0.0;
};

struct SolveResult {
  std::vector<std::uint8_t> best_state;
  double best_energy = 0.0;

  // Exact solver only: every global minimizer, deterministically ordered.
  std::vector<std::vector<std::uint8_t>> all_minimizers;
  bool minimizers_truncated = false;

  // Annealer only: each restart's refined best, ordered by energy. The
  // published weight sets can place the unconstrained optimum just outside
  // the cardinality bounds, so callers postselect feasible samples.
  std::vector<SolveSample> samples;

  std::optional<Partition> decoded;
  std::optional<ValidityReport> validity;

  std::chrono::duration<double> wall_time{0.0};
  long long evaluations = 0;
  std::string method;

  nlohmann::json to_json() const;
};

/// Exhaustive scan over all 2^dimension states with Gray-code incremental
/// energy updates, partitioned across threads by state prefix. Returns every
/// global minimizer. Refuses dimensions above options.exact_cap, naming the
/// state count.
SolveResult solve_exact(const QuboModel& model, const SolveOptions& options = {});

/// Single-threaded reference implementation of the same scan; kept for
/// testing and benchmarked against the parallel kernel.
SolveResult solve_exact_serial(const QuboModel& model,
                               const SolveOptions& options = {});

/// Single-bit-flip Metropolis annealing with a geometric temperature
/// schedule. Restarts run independently (in parallel) from seeds derived
/// from options.seed; the best state across restarts is refined to a 1-flip
/// local minimum by steepest descent. Deterministic for a fixed seed.
SolveResult solve_anneal(const QuboModel& model, const SolveOptions& options = {});

struct SolveAndValidateOptions {
  LayoutOptions layout;
  ComposeOptions compose;
  SolveOptions solve;
  ValidationConfig validation;
  int preset = 1;                       // weight preset when no explicit weights
  std::optional<PenaltyWeights> weights;
  /// Exact monotonicity blows up the variable count; the automatic path
  /// refuses to solve such models past this size unless forced.
  int exact_monotonicity_solve_cap = 30;
  bool force = false;
};

/// Composes the cost function for (ds, m), solves it (exhaustively when the
/// dimension fits under exact_cap, annealing otherwise), decodes the x block
/// and validates the partition.
SolveResult solve_and_validate(const Dataset& ds, int m,
                               const SolveAndValidateOptions& options = {});

/// Same pipeline for an already-built model (e.g. loaded from a file): picks
/// the solver, equips the annealer with the layout's row groups and staircase
/// warm starts, postselects the best constraint-satisfying sample, repairs
/// bound violations, and validates. The model dimension must match the
/// layout.
SolveResult solve_model_and_validate(const QuboModel& model,
                                     const VariableLayout& layout,
                                     const Dataset& ds,
                                     const SolveAndValidateOptions& options = {});

} // namespace ratescale

#endif
