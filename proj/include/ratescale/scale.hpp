#ifndef RATESCALE_SCALE_HPP
#define RATESCALE_SCALE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ratescale/dataset.hpp"

#include <nlohmann/json_fwd.hpp>

namespace ratescale {

/// A rating scale: m contiguous score-ordered grades with positive
/// cardinalities N_1..N_m. Construction enforces m >= 2 and N_j >= 1.
class Partition {
public:
  explicit Partition(std::vector<int> cardinalities);

  int m() const { return static_cast<int>(cardinalities_.size()); }
  int total() const { return total_; }
  const std::vector<int>& cardinalities() const { return cardinalities_; }

  bool operator==(const Partition& other) const = default;

private:
  std::vector<int> cardinalities_;
  int total_ = 0;
};

struct GradeStats {
  int cardinality = 0;
  int default_count = 0;
  double default_rate = 0.0; // default_count / cardinality
};

/// Per-grade cardinality, default count and default rate, in grade order.
/// Throws if the partition total does not match ds.n().
std::vector<GradeStats> grade_stats(const Dataset& ds, const Partition& p);

/// Adjusted Herfindahl index (H - 1/m) / (1 - 1/m) with H = sum (N_j/n)^2.
/// 0 for equal cardinalities, increasing toward 1 with concentration.
double herfindahl_adjusted(const Partition& p);

/// Non-strict default-rate monotonicity l_j <= l_{j+1}, compared exactly via
/// integer cross-multiplication (no floating-point ties).
bool check_monotonicity(const std::vector<GradeStats>& stats);

/// lambda1 <= N_j <= lambda2 for every grade.
bool check_cardinality(const Partition& p, int lambda1, int lambda2);

/// herfindahl_adjusted(p) < threshold (strict).
bool check_concentration(const Partition& p, double threshold);

/// Regulatory defaults for the cardinality thresholds. The floor of n/100 is
/// clamped to 1 so small populations cannot demand empty grades.
int default_lambda1(int n);
int default_lambda2(int n);

struct TTestResult {
  double t = 0.0;
  bool applicable = false;   // both N >= 30, sigma ratio in (1/2, 2), pooled > 0
  bool heterogeneous = false;
};

/// Two-sample t-test between consecutive grades with pooled binomial
/// deviation. Heterogeneous iff |t| >= the standard-normal quantile at
/// (2 - alpha) / 2.
TTestResult t_test_heterogeneity(const GradeStats& sj, const GradeStats& sj1,
                                 double alpha);

struct ZTestResult {
  double pass_fraction = 0.0;
  bool applicable = false;   // grade cardinality >= 60
  bool homogeneous = false;  // every split's two-tailed probability >= alpha
};

/// Random complementary splits of one grade (both sides >= 30), z-tested for
/// default-rate closeness. Deterministic per seed. `grade` is 0-based.
ZTestResult z_test_homogeneity(const Dataset& ds, const Partition& p, int grade,
                               int iterations, double alpha, std::uint64_t seed);

struct ValidationConfig {
  double concentration_threshold = 0.05;
  std::optional<int> lambda1; // default: default_lambda1(n)
  std::optional<int> lambda2; // default: default_lambda2(n)
  bool run_heterogeneity = true;
  bool run_homogeneity = true;
  double heterogeneity_alpha = 0.01;
  double homogeneity_alpha = 0.05;
  int homogeneity_iterations = 500;
  std::uint64_t seed = 0;
};

struct PairTTest {
  int first_grade = 0; // 0-based index j of the pair (j, j+1)
  TTestResult result;
};

struct GradeZTest {
  int grade = 0; // 0-based
  ZTestResult result;
};

struct ValidityReport {
  std::vector<GradeStats> grades;

  bool monotonicity_pass = false;

  double h_adj = 0.0;
  double concentration_threshold = 0.0;
  bool concentration_pass = false;

  int lambda1 = 0;
  int lambda2 = 0;
  bool cardinality_pass = false;

  bool heterogeneity_checked = false;
  std::vector<PairTTest> heterogeneity_pairs;
  bool heterogeneity_pass = false; // no applicable pair failed

  bool homogeneity_checked = false;
  std::vector<GradeZTest> homogeneity_grades;
  bool homogeneity_pass = false; // no applicable grade failed

  /// The three constraints the cost function encodes.
  bool encoded_constraints_pass() const {
    return monotonicity_pass && concentration_pass && cardinality_pass;
  }

  nlohmann::json to_json() const;
};

/// Runs all five constraint checks with the configured thresholds.
/// Statistical checks are reported not-applicable where grades are too small.
ValidityReport validate(const Dataset& ds, const Partition& p,
                        const ValidationConfig& config = {});

namespace detail {
/// Standard normal CDF and quantile (Acklam rational approximation with one
/// Halley refinement; |error| < 1e-14 over (0,1)).
double normal_cdf(double x);
double normal_quantile(double p);
} // namespace detail

} // namespace ratescale

#endif
