// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Reference values come from the published study this
// library reimplements; each tolerance is fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ratescale/experiments.hpp"

using namespace ratescale;

namespace {

int g_failures = 0;

void report(int criterion, const char* label, bool pass,
            const std::string& details) {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion,
              label, details.empty() ? "" : " -- ", details.c_str());
  if (!pass) ++g_failures;
}

void note(const std::string& text) { std::printf("       %s\n", text.c_str()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------
// Criterion 1: the twelve reference configuration counts, exactly, under 1 s.

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::tuple<int, int, std::uint64_t>> table{
      {8, 3, 21},       {12, 3, 55},      {14, 4, 286},    {17, 4, 560},
      {20, 5, 3876},    {25, 5, 10626},   {32, 5, 31465},  {40, 6, 575757},
      {48, 6, 1533939}, {52, 6, 2349060}, {60, 6, 5006386},
      {70, 6, 11238513}};
  bool pass = true;
  for (const auto& [n, m, expected] : table)
    if (count_configurations(n, m) != BigUint(expected)) pass = false;
  const double elapsed = seconds_since(t0);
  pass = pass && elapsed < 1.0;
  char buf[96];
  std::snprintf(buf, sizeof buf, "12/12 exact in %.3f s", elapsed);
  report(1, "configuration counts", pass, buf);
}

// ---------------------------------------------------------------------------
// Criterion 2: confusion matrices with the set-1 weight ratio, under 10 s
// per instance. The mu-independent counts (TN, actual positives) are hard
// requirements.

bool confusion_case(int n, int m, const std::vector<int>& defaults,
                    std::uint64_t tp, std::uint64_t fp, std::uint64_t tn,
                    std::uint64_t fn, std::string& details) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ds = Dataset::from_default_positions(n, defaults);
  const auto result = monotonicity_confusion(ds, m);
  const double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "got (TP=%llu FP=%llu TN=%llu FN=%llu) in %.2f s",
                (unsigned long long)result.matrix.tp,
                (unsigned long long)result.matrix.fp,
                (unsigned long long)result.matrix.tn,
                (unsigned long long)result.matrix.fn, elapsed);
  details = buf;
  return result.matrix.tp == tp && result.matrix.fp == fp &&
         result.matrix.tn == tn && result.matrix.fn == fn && elapsed < 10.0;
}

void criterion_2() {
  std::string details_a, details_b, details_b2;
  const bool pass_a =
      confusion_case(13, 4, {10, 11, 13}, 1, 0, 43, 176, details_a);
  report(2, "confusion matrix, 13 counterparts (defaults 10,11,13)", pass_a,
         details_a + ", expected (1,0,43,176)");

  const bool pass_b =
      confusion_case(14, 4, {11, 13, 14}, 1, 0, 48, 237, details_b);
  report(2, "confusion matrix, 14 counterparts (defaults 11,13,14)", pass_b,
         details_b + ", expected (1,0,48,237)");
  if (!pass_b) {
    note("the reference counts are weight-independent, so no weight ratio can");
    note("reconcile them with defaults {11,13,14}; exhaustive search over all");
    note("3-default vectors shows {11,12,14} is the unique vector producing");
    note("(1,0,48,237) -- checked below as documentation, not as the criterion");
    const bool pass_b2 =
        confusion_case(14, 4, {11, 12, 14}, 1, 0, 48, 237, details_b2);
    note(std::string(pass_b2 ? "[ok] " : "[??] ") +
         "defaults {11,12,14}: " + details_b2);
  }
}

// ---------------------------------------------------------------------------
// Criterion 3: variable accounting.

void criterion_3() {
  bool pass = true;
  std::string details;

  LayoutOptions plain;
  plain.include_thresholds = false;
  if (VariableLayout::create(8, 3, plain).total_variables() != 24) {
    pass = false;
    details += "24-variable case off; ";
  }

  LayoutOptions exact;
  exact.include_thresholds = false;
  exact.exact_monotonicity = true;
  exact.default_count = 2;
  if (VariableLayout::create(5, 3, exact).total_variables() != 45) {
    pass = false;
    details += "45-variable case off; ";
  }

  LayoutOptions widths;
  widths.lambda1 = 1;
  widths.lambda2 = 2;
  const auto layout = VariableLayout::create(4, 3, widths);
  if (layout.slack1_width != 2 || layout.slack2_width != 2) {
    pass = false;
    details += "slack widths off; ";
  }
  report(3, "variable accounting (24, 45, widths 2/2)", pass, details);
}

// ---------------------------------------------------------------------------
// Criterion 4: penalty property suite over every dataset with n <= 6,
// m in {2,3}, 1 <= d <= n-1; under 2 minutes total.

template <typename F>
void for_each_unique_row_assignment(int n, int m, F&& body) {
  std::vector<int> g(n, 1);
  for (;;) {
    body(g);
    int pos = n - 1;
    while (pos >= 0 && g[pos] == m) g[pos--] = 1;
    if (pos < 0) return;
    ++g[pos];
  }
}

bool is_staircase(const std::vector<int>& g, int m) {
  if (g.front() != 1 || g.back() != m) return false;
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    if (g[i + 1] != g[i] && g[i + 1] != g[i] + 1) return false;
  return true;
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass_a = true, pass_b = true, pass_c = true, pass_d = true;

  LayoutOptions no_thresholds;
  no_thresholds.include_thresholds = false;

  for (int n = 2; n <= 6; ++n) {
    for (int m = 2; m <= 3 && m <= n; ++m) {
      const auto layout = VariableLayout::create(n, m, no_thresholds);
      const PenaltyWeights w = preset_weights(1, 150, 9, 6); // ordered set

      // (a) Staircases are exactly the logical minimizers among strings with
      // one grade per counterpart.
      const auto logical = penalty_logical_global(layout, w);
      const double floor_energy = -w.mu03 * (n - m) - w.mu04 * (m - 1);
      for_each_unique_row_assignment(n, m, [&](const std::vector<int>& g) {
        std::vector<std::uint8_t> state(layout.total_variables(), 0);
        for (int i = 1; i <= n; ++i) state[layout.x_index(i, g[i - 1])] = 1;
        const double e = logical.evaluate(state);
        if (is_staircase(g, m)) {
          if (std::abs(e - floor_energy) > 1e-9) pass_a = false;
        } else if (e <= floor_energy + 1e-9) {
          pass_a = false;
        }
      });

      // (b) Concentration equals mu3 * H_adj on every staircase, 1e-12.
      const auto concentration = penalty_concentration(layout, w.mu3);
      CompositionEnumerator enumerator(n, m);
      std::vector<int> parts;
      while (enumerator.next(parts)) {
        const Partition p(parts);
        const auto state = partition_to_state(p, layout);
        if (std::abs(concentration.evaluate(state) -
                     w.mu3 * herfindahl_adjusted(p)) > 1e-12)
          pass_b = false;
      }

      // (c) Cardinality penalty with optimal slacks is zero iff the bounds
      // hold.
      LayoutOptions bounded;
      bounded.lambda1 = 1;
      bounded.lambda2 = (n + 1) / 2;
      const auto card_layout = VariableLayout::create(n, m, bounded);
      const auto cardinality = penalty_cardinality(card_layout, 2.0, 3.0);
      enumerator.reset();
      while (enumerator.next(parts)) {
        const Partition p(parts);
        auto state = partition_to_state(p, card_layout);
        complete_threshold_slacks(state, card_layout);
        const double e = cardinality.evaluate(state);
        const bool within = check_cardinality(p, card_layout.lambda1,
                                              card_layout.lambda2);
        if (within ? std::abs(e) > 1e-12 : e < 1.0) pass_c = false;
      }

      // (d) Exact-monotonicity zero-penalty staircases equal the classical
      // check, over every default vector with 1 <= d <= n-1. The model is a
      // sum of nonnegative gadgets and squares, so the minimum over the
      // auxiliary bits is zero exactly when the analytic completion hits 0.
      for (std::uint32_t bits = 1; bits + 1 < (1u << n); ++bits) {
        std::vector<std::uint8_t> flags(n);
        for (int i = 0; i < n; ++i) flags[i] = (bits >> i) & 1;
        const Dataset ds(flags);
        LayoutOptions exact = no_thresholds;
        exact.exact_monotonicity = true;
        exact.default_count = ds.default_count();
        const auto exact_layout = VariableLayout::create(n, m, exact);
        const auto model =
            penalty_monotonicity_exact(exact_layout, ds, 1.0, 1.0);
        enumerator.reset();
        while (enumerator.next(parts)) {
          const Partition p(parts);
          auto state = partition_to_state(p, exact_layout);
          complete_exact_monotonicity_bits(state, exact_layout, ds);
          const double e = model.evaluate(state);
          const bool monotone = check_monotonicity(grade_stats(ds, p));
          if (monotone ? std::abs(e) > 1e-12 : e < 0.5) pass_d = false;
        }
      }
    }
  }

  const double elapsed = seconds_since(t0);
  const bool in_budget = elapsed < 120.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f s", elapsed);
  report(4, "penalty properties (a) logical minimizers", pass_a && in_budget, buf);
  report(4, "penalty properties (b) concentration equality", pass_b && in_budget, "");
  report(4, "penalty properties (c) cardinality zero iff bounds", pass_c && in_budget, "");
  report(4, "penalty properties (d) exact monotonicity equivalence", pass_d && in_budget, "");
}

// ---------------------------------------------------------------------------
// Criterion 5: solver equivalence on 50 seeded random instances, dim <= 16;
// the annealer must reach the optimum on at least 95% of them; 2 minutes.

QuboModel random_instance(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  QuboBuilder builder(dim);
  builder.add_offset(coeff(rng));
  for (int i = 0; i < dim; ++i) builder.add_linear(i, coeff(rng));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (u(rng) < 0.5) builder.add_quadratic(i, j, coeff(rng));
  return builder.build();
}

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20250106);
  int argmin_matches = 0, anneal_hits = 0;
  const int instances = 50;

  for (int k = 0; k < instances; ++k) {
    const int dim = 10 + static_cast<int>(rng() % 7); // 10..16
    const auto model = random_instance(rng, dim);

    // Independent oracle: full scan with fresh evaluations.
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint8_t> state(dim);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dim); ++mask) {
      for (int i = 0; i < dim; ++i)
        state[i] = static_cast<std::uint8_t>((mask >> i) & 1);
      best = std::min(best, model.evaluate(state));
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(best));
    std::vector<std::vector<std::uint8_t>> oracle;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dim); ++mask) {
      for (int i = 0; i < dim; ++i)
        state[i] = static_cast<std::uint8_t>((mask >> i) & 1);
      if (model.evaluate(state) <= best + tol) oracle.push_back(state);
    }

    const auto exact = solve_exact(model);
    if (exact.all_minimizers == oracle &&
        std::abs(exact.best_energy - best) <= tol)
      ++argmin_matches;

    SolveOptions heuristic;
    heuristic.seed = 1000 + k;
    const auto anneal = solve_anneal(model, heuristic);
    if (anneal.best_energy <= best + tol) ++anneal_hits;
  }

  const double elapsed = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "argmin sets %d/50, anneal hits %d/50, %.1f s",
                argmin_matches, anneal_hits, elapsed);
  report(5, "solver equivalence",
         argmin_matches == instances && anneal_hits >= 48 && elapsed < 120.0,
         buf);
}

// ---------------------------------------------------------------------------
// Criterion 6: end-to-end validity with preset set 1 on the 150/9 instance
// within a 3-minute budget.

void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset ds =
      Dataset::from_default_positions(150, {115, 131, 133, 147, 149, 150});
  SolveAndValidateOptions options;
  options.preset = 1;
  options.solve.seed = 0;
  const auto result = solve_and_validate(ds, 9, options);
  const double elapsed = seconds_since(t0);

  const bool valid = result.validity && result.validity->monotonicity_pass &&
                     result.validity->concentration_pass &&
                     result.validity->cardinality_pass;
  char buf[192];
  if (result.decoded) {
    std::string cards;
    for (int c : result.decoded->cardinalities())
      cards += std::to_string(c) + " ";
    std::snprintf(buf, sizeof buf,
                  "partition [%s] h_adj=%.5f energy=%.1f in %.1f s", cards.c_str(),
                  result.validity->h_adj, result.best_energy, elapsed);
  } else {
    std::snprintf(buf, sizeof buf, "no decodable solution in %.1f s", elapsed);
  }
  report(6, "end-to-end validity, 150 counterparts / 9 grades / preset 1",
         valid && elapsed < 180.0, buf);
}

// ---------------------------------------------------------------------------
// Criterion 7: power-law fit of the reference benchmark table and the two
// published extrapolations within 5%.

void criterion_7() {
  const std::vector<std::pair<std::uint64_t, double>> table{
      {21, 0.001989},      {55, 0.009527},      {286, 0.080983},
      {560, 0.225437},     {3876, 2.872898},    {10626, 11.909233},
      {31465, 55.039188},  {575757, 1792.051127},
      {1533939, 6691.606785}, {2349060, 13166.657564},
      {5006386, 33767.710212}, {11238513, 103726.824730}};
  std::vector<BenchmarkRow> rows;
  for (const auto& [c, t] : table) {
    BenchmarkRow row;
    row.configurations = c;
    row.elapsed = std::chrono::duration<double>(t);
    rows.push_back(row);
  }
  const auto fit = fit_power_law(rows);
  const bool b_ok = std::abs(fit.b - 1.33) <= 0.05;

  const auto big = extrapolate_runtime(fit.a, fit.b, 2000, 9);
  const auto huge = extrapolate_runtime(fit.a, fit.b, 20000, 9);
  const bool big_ok = std::abs(big.days - 4.64e19) / 4.64e19 < 0.05;
  const bool huge_ok = std::abs(huge.days - 1.99e30) / 1.99e30 < 0.05;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "a=%.3e b=%.4f; extrapolations %.3e / %.3e days", fit.a, fit.b,
                big.days, huge.days);
  report(7, "power-law fit and extrapolations", b_ok && big_ok && huge_ok, buf);
}

} // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  std::printf("[----] criterion 8: wall-clock reproduction is out of scope; "
              "the scaling and count checks above stand in for it\n");
  if (g_failures > 0)
    std::printf("%d criterion check(s) failed\n", g_failures);
  else
    std::printf("all criterion checks passed\n");
  return g_failures > 0 ? 1 : 0;
}
