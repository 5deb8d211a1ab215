#ifndef RATESCALE_BASELINE_HPP
#define RATESCALE_BASELINE_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ratescale/dataset.hpp"
#include "ratescale/scale.hpp"

namespace ratescale {

using BigUint = boost::multiprecision::cpp_int;

/// binomial(n-1, m-1): the number of compositions of n into m positive
/// parts. Exact for any n reachable in practice (arbitrary precision).
BigUint count_configurations(int n, int m);

/// Natural log of the same count via lgamma, for extrapolation arithmetic.
double log_count_configurations(int n, int m);

/// In-place lexicographic successor over compositions of a fixed total into
/// positive parts; false when `parts` is already the last composition.
bool next_composition(std::vector<int>& parts);

/// Streams every composition of n into m positive parts exactly once, in
/// lexicographic order. Restartable and deterministic.
class CompositionEnumerator {
public:
  CompositionEnumerator(int n, int m);

  /// Fills `out` with the next composition; false when exhausted.
  bool next(std::vector<int>& out);

  void reset();

  /// The rank-th composition (0-based) in lexicographic order. Used to split
  /// the composition space into contiguous chunks for parallel scans.
  static std::vector<int> unrank(int n, int m, std::uint64_t rank);

private:
  int n_;
  int m_;
  bool done_ = false;
  bool first_ = true;
  std::vector<int> current_;
};

struct BruteForceConfig {
  bool monotonicity = true;
  bool heterogeneity = false;
  bool concentration = true;
  bool cardinality = true;
  bool homogeneity = false;

  double concentration_threshold = 0.05;
  std::optional<int> lambda1; // default: default_lambda1(n)
  std::optional<int> lambda2; // default: default_lambda2(n)
  double heterogeneity_alpha = 0.01;
  double homogeneity_alpha = 0.05;
  int homogeneity_iterations = 500;
  std::uint64_t seed = 0;

  int threads = 0; // 0 = library default, 1 = serial reference
};

struct BenchmarkRow {
  int n = 0;
  int m = 0;
  BigUint configurations;
  std::uint64_t valid_count = 0;
  std::chrono::duration<double> elapsed{0.0};
};

struct BruteForceResult {
  std::vector<Partition> valid; // in enumeration order
  BenchmarkRow row;
};

/// Enumerates every composition and applies the constraint checks in order
/// (monotonicity, heterogeneity, concentration, cardinality, homogeneity)
/// with short-circuit discard. The composition space is split into contiguous
/// chunks across threads; survivors are merged back into enumeration order.
/// Reported elapsed time covers the filter loop only.
BruteForceResult brute_force_search(const Dataset& ds, int m,
                                    const BruteForceConfig& config = {});

struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
};

/// Least-squares line through (log configurations, log elapsed); returns
/// (exp(intercept), slope). Requires at least 3 rows with positive times.
PowerLawFit fit_power_law(std::span<const BenchmarkRow> rows);

/// CSV block `n,m,configurations,valid_count,elapsed_seconds`.
std::string benchmark_csv(std::span<const BenchmarkRow> rows);

} // namespace ratescale

#endif
