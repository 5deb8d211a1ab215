#ifndef RATESCALE_QUBO_HPP
#define RATESCALE_QUBO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

namespace ratescale {

/// Sparse QUBO cost function offset + sum_i c_i x_i + sum_{i<j} c_ij x_i x_j
/// over binary variables. Quadratic pairs are canonical (i < j), diagonal
/// terms are folded into the linear part (x^2 = x), zero coefficients are
/// never stored. Immutable by convention once built.
struct QuboModel {
  int dimension = 0;
  double offset = 0.0;
  std::vector<std::pair<int, double>> linear;            // sorted by index
  std::vector<std::tuple<int, int, double>> quadratic;   // sorted, i < j

  /// offset + linear + quadratic over the set bits. Throws on size mismatch.
  double evaluate(std::span<const std::uint8_t> state) const;

  std::size_t term_count() const { return linear.size() + quadratic.size(); }
};

/// Accumulates coefficients with canonicalization; build() prunes exact zeros
/// and emits deterministically sorted term lists.
class QuboBuilder {
public:
  explicit QuboBuilder(int dimension);

  void add_offset(double c) { offset_ += c; }
  void add_linear(int i, double c);
  /// i == j folds into the linear term; i > j is swapped.
  void add_quadratic(int i, int j, double c);
  /// Coefficient-wise accumulation of another model scaled by factor.
  void add_model(const QuboModel& part, double factor = 1.0);

  QuboModel build();

private:
  int dimension_;
  double offset_ = 0.0;
  std::vector<double> linear_;                 // dense accumulator
  std::vector<std::pair<std::uint64_t, double>> quad_;  // packed keys, merged in build()
};

/// Text format round trip. Header `qubo v1 dim=<D> offset=<q>`, then one line
/// per nonzero term: `L <i> <c>` or `Q <i> <j> <c>` with i < j. Coefficients
/// are written with shortest round-trip precision.
void save_qubo(const QuboModel& model, const std::filesystem::path& path);
QuboModel load_qubo(const std::filesystem::path& path);

struct LayoutOptions {
  bool include_thresholds = true;
  std::optional<int> lambda1; // default: default_lambda1(n)
  std::optional<int> lambda2; // default: default_lambda2(n)
  bool exact_monotonicity = false;
  int default_count = 0;      // d; required in [1, n-1] when exact_monotonicity
};

/// Flat variable indexing for one problem instance.
///
/// Blocks, in order: assignment bits x (n*m, row-major by counterpart),
/// lower-threshold slack s1 (slack1_width * m), upper-threshold slack s2
/// (slack2_width * m), linearization bits y (2*(m-1)*(n-d)*d, exact
/// monotonicity only) and its slack s_y (slack_mono_width * (m-1)).
struct VariableLayout {
  int n = 0;
  int m = 0;

  bool include_thresholds = false;
  int lambda1 = 0;
  int lambda2 = 0;
  int slack1_width = 0; // floor(1 + log2(n - lambda1))
  int slack2_width = 0; // floor(1 + log2(lambda2))

  bool exact_monotonicity = false;
  int default_count = 0;
  int slack_mono_width = 0; // floor(1 + log2((n-d)*d))

  /// Validates 2 <= m <= n and, with thresholds, m*lambda1 <= n <= m*lambda2;
  /// throws std::invalid_argument naming the violated inequality.
  static VariableLayout create(int n, int m, const LayoutOptions& options = {});

  // 1-based counterpart i and grade j, as in the derivations.
  int x_index(int i, int j) const { return (i - 1) * m + (j - 1); }
  int slack1_offset() const { return n * m; }
  int slack1_index(int l, int j) const { return slack1_offset() + l * m + (j - 1); }
  int slack2_offset() const { return slack1_offset() + slack1_width * m; }
  int slack2_index(int l, int j) const { return slack2_offset() + l * m + (j - 1); }
  int y_offset() const { return slack2_offset() + slack2_width * m; }
  int y_count() const {
    return exact_monotonicity ? 2 * (m - 1) * (n - default_count) * default_count : 0;
  }
  int slack_mono_offset() const { return y_offset() + y_count(); }
  /// l in [0, slack_mono_width), grade pair j in [1, m-1].
  int slack_mono_index(int l, int j) const {
    return slack_mono_offset() + l * (m - 1) + (j - 1);
  }
  int total_variables() const {
    return slack_mono_offset() + slack_mono_width * (m - 1);
  }
};

} // namespace ratescale

#endif
