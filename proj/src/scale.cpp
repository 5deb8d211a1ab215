#include "ratescale/scale.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "rng.hpp"

namespace ratescale {

Partition::Partition(std::vector<int> cardinalities)
    : cardinalities_(std::move(cardinalities)) {
  if (cardinalities_.size() < 2)
    throw std::invalid_argument("partition: needs at least 2 grades");
  for (int c : cardinalities_) {
    if (c < 1) throw std::invalid_argument("partition: empty grade");
    total_ += c;
  }
}

std::vector<GradeStats> grade_stats(const Dataset& ds, const Partition& p) {
  if (p.total() != ds.n())
    throw std::invalid_argument("grade_stats: partition sums to " +
                                std::to_string(p.total()) + ", dataset has " +
                                std::to_string(ds.n()));
  std::vector<GradeStats> stats;
  stats.reserve(p.m());
  int i = 0;
  for (int card : p.cardinalities()) {
    int d = 0;
    for (int k = 0; k < card; ++k) d += ds.defaults()[i + k];
    i += card;
    stats.push_back({card, d, static_cast<double>(d) / card});
  }
  return stats;
}

double herfindahl_adjusted(const Partition& p) {
  const double n = p.total();
  const double m = p.m();
  double h = 0.0;
  for (int card : p.cardinalities()) {
    const double f = card / n;
    h += f * f;
  }
  return (h - 1.0 / m) / (1.0 - 1.0 / m);
}

bool check_monotonicity(const std::vector<GradeStats>& stats) {
  for (std::size_t j = 0; j + 1 < stats.size(); ++j) {
    // l_j <= l_{j+1}  <=>  d_j * N_{j+1} <= d_{j+1} * N_j, exactly.
    const long long lhs = static_cast<long long>(stats[j].default_count) *
                          stats[j + 1].cardinality;
    const long long rhs = static_cast<long long>(stats[j + 1].default_count) *
                          stats[j].cardinality;
    if (lhs > rhs) return false;
  }
  return true;
}

bool check_cardinality(const Partition& p, int lambda1, int lambda2) {
  return std::all_of(p.cardinalities().begin(), p.cardinalities().end(),
                     [&](int c) { return lambda1 <= c && c <= lambda2; });
}

bool check_concentration(const Partition& p, double threshold) {
  return herfindahl_adjusted(p) < threshold;
}

int default_lambda1(int n) { return std::max(1, n / 100); }

int default_lambda2(int n) { return (15 * n + 99) / 100; }

namespace detail {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p outside (0,1)");

  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;

  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against the exact CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

} // namespace detail

TTestResult t_test_heterogeneity(const GradeStats& sj, const GradeStats& sj1,
                                 double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("t_test: alpha outside (0,1)");

  TTestResult r;
  const double var_j = sj.default_rate * (1.0 - sj.default_rate);
  const double var_j1 = sj1.default_rate * (1.0 - sj1.default_rate);

  const double nj = sj.cardinality;
  const double nj1 = sj1.cardinality;
  const double pooled_var =
      ((nj - 1.0) * var_j + (nj1 - 1.0) * var_j1) / (nj + nj1 - 2.0);
  if (pooled_var > 0.0)
    r.t = (sj.default_rate - sj1.default_rate) /
          (std::sqrt(pooled_var) * std::sqrt(1.0 / nj + 1.0 / nj1));

  if (sj.cardinality < 30 || sj1.cardinality < 30) return r;
  if (!(var_j > 0.0) || !(var_j1 > 0.0)) return r; // ratio/pooled degenerate
  const double ratio = std::sqrt(var_j / var_j1);
  if (!(ratio > 0.5 && ratio < 2.0)) return r;

  r.applicable = true;
  const double gamma = detail::normal_quantile((2.0 - alpha) / 2.0);
  r.heterogeneous = std::abs(r.t) >= gamma;
  return r;
}

ZTestResult z_test_homogeneity(const Dataset& ds, const Partition& p, int grade,
                               int iterations, double alpha,
                               std::uint64_t seed) {
  if (grade < 0 || grade >= p.m())
    throw std::invalid_argument("z_test: grade index out of range");
  if (iterations < 1)
    throw std::invalid_argument("z_test: iterations must be positive");
  if (p.total() != ds.n())
    throw std::invalid_argument("z_test: partition/dataset size mismatch");

  ZTestResult r;
  const int card = p.cardinalities()[grade];
  if (card < 60) return r; // cannot split into two sides of >= 30
  r.applicable = true;

  int first = 0;
  for (int g = 0; g < grade; ++g) first += p.cardinalities()[g];

  std::vector<int> members(card);
  std::iota(members.begin(), members.end(), first);
  const int total_defaults =
      std::accumulate(members.begin(), members.end(), 0,
                      [&](int acc, int i) { return acc + ds.defaults()[i]; });
  const double rate = static_cast<double>(total_defaults) / card;
  const double var = rate * (1.0 - rate);

  detail::Rng rng(detail::derive_seed(seed, 0x686f6d ^ grade));
  int passes = 0;
  for (int q = 0; q < iterations; ++q) {
    const int split = 30 + static_cast<int>(rng.below(card - 60 + 1));
    // Partial Fisher-Yates: the first `split` entries become one side.
    for (int k = 0; k < split; ++k) {
      const int j = k + static_cast<int>(rng.below(card - k));
      std::swap(members[k], members[j]);
    }
    int d1 = 0;
    for (int k = 0; k < split; ++k) d1 += ds.defaults()[members[k]];
    const int d2 = total_defaults - d1;
    const int n1 = split;
    const int n2 = card - split;

    double z = 0.0;
    if (var > 0.0)
      z = (static_cast<double>(d1) / n1 - static_cast<double>(d2) / n2) /
          std::sqrt(var * (1.0 / n1 + 1.0 / n2));
    const double prob = 2.0 - 2.0 * detail::normal_cdf(std::abs(z));
    if (prob >= alpha) ++passes;
  }
  r.pass_fraction = static_cast<double>(passes) / iterations;
  r.homogeneous = passes == iterations;
  return r;
}

ValidityReport validate(const Dataset& ds, const Partition& p,
                        const ValidationConfig& config) {
  ValidityReport report;
  report.grades = grade_stats(ds, p);

  report.monotonicity_pass = check_monotonicity(report.grades);

  report.h_adj = herfindahl_adjusted(p);
  report.concentration_threshold = config.concentration_threshold;
  report.concentration_pass = report.h_adj < config.concentration_threshold;

  report.lambda1 = config.lambda1.value_or(default_lambda1(ds.n()));
  report.lambda2 = config.lambda2.value_or(default_lambda2(ds.n()));
  report.cardinality_pass = check_cardinality(p, report.lambda1, report.lambda2);

  report.heterogeneity_checked = config.run_heterogeneity;
  report.heterogeneity_pass = true;
  if (config.run_heterogeneity) {
    for (int j = 0; j + 1 < p.m(); ++j) {
      PairTTest pair{j, t_test_heterogeneity(report.grades[j],
                                             report.grades[j + 1],
                                             config.heterogeneity_alpha)};
      if (pair.result.applicable && !pair.result.heterogeneous)
        report.heterogeneity_pass = false;
      report.heterogeneity_pairs.push_back(pair);
    }
  }

  report.homogeneity_checked = config.run_homogeneity;
  report.homogeneity_pass = true;
  if (config.run_homogeneity) {
    for (int g = 0; g < p.m(); ++g) {
      GradeZTest grade{g, z_test_homogeneity(ds, p, g,
                                             config.homogeneity_iterations,
                                             config.homogeneity_alpha,
                                             config.seed)};
      if (grade.result.applicable && !grade.result.homogeneous)
        report.homogeneity_pass = false;
      report.homogeneity_grades.push_back(grade);
    }
  }
  return report;
}

nlohmann::json ValidityReport::to_json() const {
  nlohmann::json grades_json = nlohmann::json::array();
  for (const auto& g : grades)
    grades_json.push_back({{"cardinality", g.cardinality},
                           {"defaults", g.default_count},
                           {"default_rate", g.default_rate}});

  nlohmann::json het_pairs = nlohmann::json::array();
  for (const auto& pair : heterogeneity_pairs)
    het_pairs.push_back({{"pair", pair.first_grade},
                         {"t", pair.result.t},
                         {"applicable", pair.result.applicable},
                         {"heterogeneous", pair.result.heterogeneous}});

  nlohmann::json hom_grades = nlohmann::json::array();
  for (const auto& grade : homogeneity_grades)
    hom_grades.push_back({{"grade", grade.grade},
                          {"pass_fraction", grade.result.pass_fraction},
                          {"applicable", grade.result.applicable},
                          {"homogeneous", grade.result.homogeneous}});

  return {
      {"grades", grades_json},
      {"monotonicity", {{"pass", monotonicity_pass}}},
      {"concentration",
       {{"pass", concentration_pass},
        {"h_adj", h_adj},
        {"threshold", concentration_threshold}}},
      {"cardinality",
       {{"pass", cardinality_pass}, {"lambda1", lambda1}, {"lambda2", lambda2}}},
      {"heterogeneity",
       {{"checked", heterogeneity_checked},
        {"pass", heterogeneity_pass},
        {"pairs", het_pairs}}},
      {"homogeneity",
       {{"checked", homogeneity_checked},
        {"pass", homogeneity_pass},
        {"grades", hom_grades}}},
  };
}

} // namespace ratescale
