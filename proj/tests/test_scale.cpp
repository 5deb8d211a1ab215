#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "ratescale/scale.hpp"

using namespace ratescale;

TEST_CASE("partition construction enforces invariants") {
  CHECK_THROWS(Partition({5}));        // single grade
  CHECK_THROWS(Partition({3, 0, 2})); // empty grade
  const Partition p({2, 3});
  CHECK(p.m() == 2);
  CHECK(p.total() == 5);
}

TEST_CASE("grade stats reproduce the published 150/9 solution") {
  const auto ds = Dataset::from_default_positions(150, {115, 131, 133, 147, 149, 150});
  const Partition p({16, 16, 16, 16, 17, 17, 17, 17, 18});
  const auto stats = grade_stats(ds, p);
  REQUIRE(stats.size() == 9);
  CHECK(stats[8].cardinality == 18);
  CHECK(stats[8].default_count == 4);
  CHECK(stats[8].default_rate == doctest::Approx(0.222222).epsilon(1e-4));
  CHECK(stats[6].default_count == 1);
  CHECK(stats[7].default_count == 1);
  for (int g = 0; g < 6; ++g) CHECK(stats[g].default_count == 0);

  // Cardinality-weighted default rates average to d/n exactly.
  double weighted = 0.0;
  for (const auto& s : stats) weighted += s.default_rate * s.cardinality;
  CHECK(weighted / ds.n() == doctest::Approx(6.0 / 150.0).epsilon(1e-12));
}

TEST_CASE("grade stats edge cases") {
  const auto ds = Dataset::from_default_positions(10, {});
  const auto stats = grade_stats(ds, Partition({5, 5}));
  CHECK(stats[0].default_rate == 0.0);
  CHECK(stats[1].default_rate == 0.0);

  const auto ds2 = Dataset::from_default_positions(10, {9, 10});
  const auto stats2 = grade_stats(ds2, Partition({8, 2}));
  CHECK(stats2[1].default_rate == 1.0);

  CHECK_THROWS(grade_stats(ds, Partition({4, 4}))); // totals mismatch
}

TEST_CASE("adjusted herfindahl index") {
  CHECK(herfindahl_adjusted(Partition({5, 5})) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(herfindahl_adjusted(Partition({4, 4, 4})) == doctest::Approx(0.0).epsilon(1e-15));
  // (9,1) out of 10: H = 0.82, H_adj = 0.64.
  CHECK(herfindahl_adjusted(Partition({9, 1})) == doctest::Approx(0.64).epsilon(1e-12));
  // The 150/9 solution: H = 2504/22500, H_adj = 2.0e-4 by direct evaluation.
  CHECK(herfindahl_adjusted(Partition({16, 16, 16, 16, 17, 17, 17, 17, 18})) ==
        doctest::Approx(2.0e-4).epsilon(1e-9));
}

TEST_CASE("herfindahl bounds and transfer monotonicity") {
  // Moving one counterpart from a smaller to a larger grade raises H_adj.
  for (int big = 5; big < 9; ++big) {
    const double before = herfindahl_adjusted(Partition({big, 10 - big}));
    const double after = herfindahl_adjusted(Partition({big + 1, 9 - big}));
    CHECK(after > before);
  }
  for (int a = 1; a <= 8; ++a)
    for (int b = 1; a + b <= 9; ++b) {
      const int c = 10 - a - b;
      if (c < 1) continue;
      const double h = herfindahl_adjusted(Partition({a, b, c}));
      CHECK(h >= 0.0);
      CHECK(h <= 1.0);
    }
}

TEST_CASE("monotonicity check") {
  // Published DR columns.
  const auto ds4 = Dataset::from_default_positions(150, {115, 131, 133, 147, 149, 150});
  CHECK(check_monotonicity(grade_stats(ds4, Partition({16, 16, 16, 16, 17, 17, 17, 17, 18}))));

  const auto ds5 = Dataset::from_default_positions(
      150, {56, 63, 91, 96, 104, 106, 107, 113, 119, 122, 126, 127, 129, 133,
            135, 144, 146, 149});
  CHECK(check_monotonicity(grade_stats(ds5, Partition({36, 40, 42, 32}))));

  // Decreasing pair fails; equal adjacent rates are allowed (non-strict).
  CHECK_FALSE(check_monotonicity({{10, 1, 0.1}, {20, 1, 0.05}}));
  CHECK(check_monotonicity({{10, 1, 0.1}, {20, 2, 0.1}}));
}

TEST_CASE("cardinality and concentration checks") {
  const Partition table4({16, 16, 16, 16, 17, 17, 17, 17, 18});
  CHECK(check_cardinality(table4, 1, 23));
  CHECK(check_cardinality(Partition({3, 7}), 0, 10));
  CHECK_FALSE(check_cardinality(Partition({30, 5}), 10, 40));

  CHECK(check_concentration(Partition({5, 5}), 1e-9));
  CHECK_FALSE(check_concentration(Partition({9, 1}), 0.05));
  CHECK(check_concentration(table4, 0.05));

  CHECK(default_lambda1(150) == 1);
  CHECK(default_lambda2(150) == 23);
  CHECK(default_lambda1(50) == 1); // floor(50/100) clamped up to 1
  CHECK(default_lambda2(40) == 6);
}

TEST_CASE("t test heterogeneity") {
  // Frozen against an independent statistics oracle:
  // N=100/100, rates 0.05/0.20 -> t = -3.2929278, gamma(0.01) = 2.5758293.
  const GradeStats a{100, 5, 0.05};
  const GradeStats b{100, 20, 0.20};
  const auto r = t_test_heterogeneity(a, b, 0.01);
  CHECK(r.applicable);
  CHECK(r.t == doctest::Approx(-3.2929277996907107).epsilon(1e-9));
  CHECK(r.heterogeneous);

  // Antisymmetric under swapping the grades.
  const auto swapped = t_test_heterogeneity(b, a, 0.01);
  CHECK(swapped.t == doctest::Approx(-r.t).epsilon(1e-12));

  // Equal rates: t = 0, not heterogeneous.
  const auto equal = t_test_heterogeneity({100, 10, 0.1}, {100, 10, 0.1}, 0.01);
  CHECK(equal.t == 0.0);
  CHECK_FALSE(equal.heterogeneous);

  // Small grades are not applicable.
  CHECK_FALSE(t_test_heterogeneity({20, 1, 0.05}, {40, 4, 0.1}, 0.01).applicable);

  // Zero pooled deviation (both rates at the boundary) is not applicable.
  CHECK_FALSE(t_test_heterogeneity({50, 0, 0.0}, {50, 50, 1.0}, 0.01).applicable);

  // Deviation ratio outside (1/2, 2) is not applicable.
  const auto skewed = t_test_heterogeneity({100, 1, 0.01}, {100, 50, 0.5}, 0.01);
  CHECK_FALSE(skewed.applicable);
}

TEST_CASE("normal quantile matches frozen oracle values") {
  CHECK(detail::normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-12));
  CHECK(detail::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(detail::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(detail::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("z test homogeneity") {
  // A grade with zero defaults: every z is 0, trivially homogeneous.
  const auto ds = Dataset::from_default_positions(140, {135});
  const Partition p({70, 70});
  const auto r = z_test_homogeneity(ds, p, 0, 100, 0.05, 5);
  CHECK(r.applicable);
  CHECK(r.homogeneous);
  CHECK(r.pass_fraction == 1.0);

  // Grades below 60 counterparts are not applicable.
  const auto small = z_test_homogeneity(Dataset::from_default_positions(118, {100}),
                                        Partition({59, 59}), 0, 100, 0.05, 5);
  CHECK_FALSE(small.applicable);

  // Deterministic per seed.
  const auto ds2 = Dataset::generate(200, 0.2, 11);
  const Partition p2({100, 100});
  const auto r1 = z_test_homogeneity(ds2, p2, 1, 200, 0.05, 9);
  const auto r2 = z_test_homogeneity(ds2, p2, 1, 200, 0.05, 9);
  CHECK(r1.pass_fraction == r2.pass_fraction);
  CHECK(r1.homogeneous == r2.homogeneous);
}

TEST_CASE("validate aggregates all five checks") {
  const auto ds = Dataset::from_default_positions(150, {115, 131, 133, 147, 149, 150});
  const Partition p({16, 16, 16, 16, 17, 17, 17, 17, 18});
  const auto report = validate(ds, p);
  CHECK(report.monotonicity_pass);
  CHECK(report.concentration_pass);
  CHECK(report.cardinality_pass);
  CHECK(report.encoded_constraints_pass());
  CHECK(report.h_adj == doctest::Approx(2.0e-4).epsilon(1e-9));
  CHECK(report.lambda1 == 1);
  CHECK(report.lambda2 == 23);
  // Grades of 16-18 counterparts: no statistical check is applicable.
  for (const auto& pair : report.heterogeneity_pairs)
    CHECK_FALSE(pair.result.applicable);
  for (const auto& grade : report.homogeneity_grades)
    CHECK_FALSE(grade.result.applicable);

  const auto ds5 = Dataset::from_default_positions(
      150, {56, 63, 91, 96, 104, 106, 107, 113, 119, 122, 126, 127, 129, 133,
            135, 144, 146, 149});
  const auto report5 = validate(ds5, Partition({36, 40, 42, 32}));
  CHECK(report5.monotonicity_pass);
  // Strictly increasing published DR column.
  for (std::size_t g = 0; g + 1 < report5.grades.size(); ++g)
    CHECK(report5.grades[g].default_rate < report5.grades[g + 1].default_rate);

  const auto json = report.to_json();
  CHECK(json["monotonicity"]["pass"].get<bool>());
  CHECK(json["cardinality"]["lambda2"].get<int>() == 23);
}
