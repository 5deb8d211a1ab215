#ifndef RATESCALE_PENALTIES_HPP
#define RATESCALE_PENALTIES_HPP

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "ratescale/dataset.hpp"
#include "ratescale/qubo.hpp"
#include "ratescale/scale.hpp"

namespace ratescale {

/// Amplification coefficients for the penalty families.
struct PenaltyWeights {
  double mu01 = 0.0; // grade uniqueness square
  double mu02 = 0.0; // first/last grade endpoints
  double mu03 = 0.0; // vertical adjacency reward
  double mu04 = 0.0; // diagonal transition reward
  double mu1 = 0.0;  // monotonicity
  double mu3 = 0.0;  // concentration
  double mu41 = 0.0; // lower cardinality threshold
  double mu42 = 0.0; // upper cardinality threshold

  // Exact monotonicity only.
  double rosenberg_lambda0 = 0.0; // product-consistency gadget
  double exact_lambda = 0.0;      // squared slack-completed inequality
};

/// The two published parameter sets, scaled by instance size.
/// Set 1: mu01=(nm)^2, mu02=5nm, mu03=mu04=40nm, mu1=5d, mu3=10n/m,
///        mu41=mu42=5n/m.
/// Set 2: mu01=4(nm)^2, mu02=5nm, mu03=mu04=75nm, mu1=12d, mu3=3n/m,
///        mu41=mu42=mu3/2.
/// Rosenberg/exact weights default to mu01 (no published values exist).
PenaltyWeights preset_weights(int set_id, int n, int m, int d);

/// Weights for the local staircase encoding, which penalizes forbidden 2x2
/// submatrices instead of rewarding adjacency. The conversion maps the three
/// strong submatrix penalties to mu03 and the weak restart penalty to mu04.
struct LocalLogicalWeights {
  double mu01 = 0.0;       // grade uniqueness square
  double mu02 = 0.0;       // endpoints
  double mu_row_end = 0.0; // submatrix (1 0 / 0 0)
  double mu_row_begin = 0.0; // submatrix (0 0 / 0 1)
  double mu_antidiag = 0.0;  // submatrix (0 1 / 1 0)
  double mu_restart = 0.0;   // weak penalty on (0 0 / 1 0)

  static LocalLogicalWeights from(const PenaltyWeights& w) {
    return {w.mu01, w.mu02, w.mu03, w.mu03, w.mu03, w.mu04};
  }
};

/// mu * (sum_l p_l x_l - G)^2 expanded into offset/linear/quadratic terms.
/// Expansion is carried out in 64-bit integer arithmetic and scaled by mu at
/// the boundary, so integer inputs stay bit-exact.
QuboModel penalty_equality(int dimension,
                           std::span<const std::pair<int, long long>> coeffs,
                           long long G, double mu);

/// mu * (D - sum_l q_l x_l - sum_l 2^l s_l)^2 for the inequality
/// sum q_l x_l <= D. slack_indices must have exactly
/// floor(1 + log2(D - min_x sum q_l x_l)) entries (0 if that range is empty).
QuboModel penalty_inequality_slack(int dimension,
                                   std::span<const std::pair<int, long long>> coeffs,
                                   long long D, double mu,
                                   std::span<const int> slack_indices);

/// Staircase penalty, global form: uniqueness square + endpoint terms
/// - mu03 * vertical adjacency - mu04 * diagonal transitions.
QuboModel penalty_logical_global(const VariableLayout& layout,
                                 const PenaltyWeights& weights);

/// Staircase penalty, local form: uniqueness square + endpoint terms +
/// three forbidden-submatrix penalties + the weak restart penalty.
QuboModel penalty_logical_local(const VariableLayout& layout,
                                const LocalLogicalWeights& weights);

/// Approximate monotonicity: mu1 * sum_{i1,i2,j<m} (d_i1 - d_i2) x_{i1 j}
/// x_{i2 j+1}. Introduces no additional variables.
QuboModel penalty_monotonicity_approx(const VariableLayout& layout,
                                      const Dataset& ds, double mu1);

/// Exact monotonicity: Rosenberg gadgets enforcing y = x_{i1 j} * x_{i2 j+1}
/// plus lambda times the squared slack-completed linear form per grade pair.
/// Requires a layout built with exact_monotonicity and 1 <= d <= n-1.
QuboModel penalty_monotonicity_exact(const VariableLayout& layout,
                                     const Dataset& ds, double lambda0,
                                     double lambda);

/// Concentration: mu3 * [ m/((m-1)n^2) * sum_{i1,i2,j} x_{i1 j} x_{i2 j}
/// - 1/(m-1) ]; equals mu3 * H_adj on staircase assignments.
QuboModel penalty_concentration(const VariableLayout& layout, double mu3);

/// Cardinality thresholds: per grade, the two expanded squares forcing
/// lambda1 <= N_j <= lambda2 through the s1/s2 slack registers.
QuboModel penalty_cardinality(const VariableLayout& layout, double mu41,
                              double mu42);

enum class LogicalEncoding { global, local };
enum class MonotonicityEncoding { none, approximate, exact };

struct ComposeOptions {
  LogicalEncoding logical = LogicalEncoding::global;
  MonotonicityEncoding monotonicity = MonotonicityEncoding::approximate;
  bool concentration = true;
  bool cardinality = true; // applies only when the layout carries thresholds
};

/// Weighted coefficient-wise sum of the selected penalty families.
QuboModel compose(const VariableLayout& layout, const PenaltyWeights& weights,
                  const Dataset& ds, const ComposeOptions& options = {});

/// Bijection from the linearized product triples (i1, i2, j) onto the y-index
/// block: lexicographic rank over the sorted triples with d_{i1 i2} != 0.
class MonotonePairTable {
public:
  MonotonePairTable(const VariableLayout& layout, const Dataset& ds);

  /// Rank within the y block; add layout.y_offset() for the flat index.
  int rank(int i1, int i2, int j) const; // 1-based i1, i2, j in [1, m-1]
  int size() const { return static_cast<int>(triples_.size()); }
  /// Triples (i1, i2, j) in rank order.
  const std::vector<std::array<int, 3>>& triples() const { return triples_; }

private:
  std::vector<std::array<int, 3>> triples_;
  int m_ = 0;
};

/// The binary staircase assignment for a partition, over the full layout
/// width; all slack and auxiliary bits are zero.
std::vector<std::uint8_t> partition_to_state(const Partition& p,
                                             const VariableLayout& layout);

/// Sets each threshold slack register to the integer that zeroes its penalty
/// residual (clamped to the representable range). The x block must already
/// hold a unique-grade-per-row assignment.
void complete_threshold_slacks(std::vector<std::uint8_t>& state,
                               const VariableLayout& layout);

/// Sets y bits to the products they linearize and each monotonicity slack
/// register to its optimal value for the current x block.
void complete_exact_monotonicity_bits(std::vector<std::uint8_t>& state,
                                      const VariableLayout& layout,
                                      const Dataset& ds);

} // namespace ratescale

#endif
