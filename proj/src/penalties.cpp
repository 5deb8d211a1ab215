#include "ratescale/penalties.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ratescale {

PenaltyWeights preset_weights(int set_id, int n, int m, int d) {
  const double nm = static_cast<double>(n) * m;
  const double ratio = static_cast<double>(n) / m;
  PenaltyWeights w;
  switch (set_id) {
    case 1:
      w.mu01 = nm * nm;
      w.mu02 = 5.0 * nm;
      w.mu03 = w.mu04 = 40.0 * nm;
      w.mu1 = 5.0 * d;
      w.mu3 = 10.0 * ratio;
      w.mu41 = w.mu42 = 5.0 * ratio;
      break;
    case 2:
      w.mu01 = 4.0 * nm * nm;
      w.mu02 = 5.0 * nm;
      w.mu03 = w.mu04 = 75.0 * nm;
      w.mu1 = 12.0 * d;
      w.mu3 = 3.0 * ratio;
      w.mu41 = w.mu42 = w.mu3 / 2.0;
      break;
    default:
      throw std::invalid_argument("preset_weights: set id must be 1 or 2");
  }
  w.rosenberg_lambda0 = w.mu01;
  w.exact_lambda = w.mu01;
  return w;
}

namespace {

// Integer expansion of (sum_l p_l x_l - G)^2, scaled by mu at the boundary.
void expand_square(QuboBuilder& builder,
                   std::span<const std::pair<int, long long>> coeffs,
                   long long G, double mu) {
  builder.add_offset(mu * static_cast<double>(G * G));
  for (std::size_t a = 0; a < coeffs.size(); ++a) {
    const auto [ia, pa] = coeffs[a];
    builder.add_linear(ia, mu * static_cast<double>(pa * pa - 2 * pa * G));
    for (std::size_t b = a + 1; b < coeffs.size(); ++b) {
      const auto [ib, pb] = coeffs[b];
      builder.add_quadratic(ia, ib, mu * static_cast<double>(2 * pa * pb));
    }
  }
}

} // namespace

QuboModel penalty_equality(int dimension,
                           std::span<const std::pair<int, long long>> coeffs,
                           long long G, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("penalty_equality: mu must be > 0");
  QuboBuilder builder(dimension);
  expand_square(builder, coeffs, G, mu);
  return builder.build();
}

QuboModel penalty_inequality_slack(int dimension,
                                   std::span<const std::pair<int, long long>> coeffs,
                                   long long D, double mu,
                                   std::span<const int> slack_indices) {
  if (!(mu > 0.0))
    throw std::invalid_argument("penalty_inequality_slack: mu must be > 0");
  long long min_value = 0;
  for (const auto& [idx, q] : coeffs)
    if (q < 0) min_value += q;
  const long long slack_range = D - min_value;
  const int want = slack_range <= 0
                       ? 0
                       : static_cast<int>(
                             std::bit_width(static_cast<unsigned long long>(slack_range)));
  if (static_cast<int>(slack_indices.size()) != want)
    throw std::invalid_argument("penalty_inequality_slack: need " +
                                std::to_string(want) + " slack bits, got " +
                                std::to_string(slack_indices.size()));

  // (D - sum q x - S)^2 == (sum q x + S - D)^2
  std::vector<std::pair<int, long long>> all(coeffs.begin(), coeffs.end());
  for (std::size_t l = 0; l < slack_indices.size(); ++l)
    all.emplace_back(slack_indices[l], 1LL << l);
  QuboBuilder builder(dimension);
  expand_square(builder, all, D, mu);
  return builder.build();
}

QuboModel penalty_logical_global(const VariableLayout& layout,
                                 const PenaltyWeights& w) {
  const int n = layout.n;
  const int m = layout.m;
  QuboBuilder builder(layout.total_variables());

  // Grade uniqueness: mu01 * sum_i (sum_j x_ij - 1)^2.
  builder.add_offset(w.mu01 * n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      builder.add_linear(layout.x_index(i, j), -w.mu01);
      for (int j2 = j + 1; j2 <= m; ++j2)
        builder.add_quadratic(layout.x_index(i, j), layout.x_index(i, j2),
                              2.0 * w.mu01);
    }
  }

  // Endpoints: mu02 * (1 - x_11) + mu02 * (1 - x_nm).
  builder.add_offset(2.0 * w.mu02);
  builder.add_linear(layout.x_index(1, 1), -w.mu02);
  builder.add_linear(layout.x_index(n, m), -w.mu02);

  // Vertical adjacency reward.
  for (int i = 1; i < n; ++i)
    for (int j = 1; j <= m; ++j)
      builder.add_quadratic(layout.x_index(i, j), layout.x_index(i + 1, j),
                            -w.mu03);

  // Diagonal transition reward.
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < m; ++j)
      builder.add_quadratic(layout.x_index(i, j), layout.x_index(i + 1, j + 1),
                            -w.mu04);

  return builder.build();
}

QuboModel penalty_logical_local(const VariableLayout& layout,
                                const LocalLogicalWeights& w) {
  const int n = layout.n;
  const int m = layout.m;
  QuboBuilder builder(layout.total_variables());

  // Shared terms: uniqueness square and endpoints.
  builder.add_offset(w.mu01 * n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= m; ++j) {
      builder.add_linear(layout.x_index(i, j), -w.mu01);
      for (int j2 = j + 1; j2 <= m; ++j2)
        builder.add_quadratic(layout.x_index(i, j), layout.x_index(i, j2),
                              2.0 * w.mu01);
    }
  builder.add_offset(2.0 * w.mu02);
  builder.add_linear(layout.x_index(1, 1), -w.mu02);
  builder.add_linear(layout.x_index(n, m), -w.mu02);

  // 2x2 submatrix penalties over (x_ij, x_ij+1 / x_i+1j, x_i+1j+1).
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < m; ++j) {
      const int a = layout.x_index(i, j);       // top left
      const int b = layout.x_index(i, j + 1);   // top right
      const int c = layout.x_index(i + 1, j);   // bottom left
      const int d = layout.x_index(i + 1, j + 1); // bottom right

      // (1 0 / 0 0): (1 - x_c - x_d) x_a + x_c x_d
      builder.add_linear(a, w.mu_row_end);
      builder.add_quadratic(a, c, -w.mu_row_end);
      builder.add_quadratic(a, d, -w.mu_row_end);
      builder.add_quadratic(c, d, w.mu_row_end);

      // (0 0 / 0 1): (1 - x_a - x_b) x_d + x_a x_b
      builder.add_linear(d, w.mu_row_begin);
      builder.add_quadratic(a, d, -w.mu_row_begin);
      builder.add_quadratic(b, d, -w.mu_row_begin);
      builder.add_quadratic(a, b, w.mu_row_begin);

      // (0 1 / 1 0): x_b x_c
      builder.add_quadratic(b, c, w.mu_antidiag);

      // Weak restart penalty on (0 0 / 1 0): (1 - x_a - x_b) x_c + x_a x_b
      builder.add_linear(c, w.mu_restart);
      builder.add_quadratic(a, c, -w.mu_restart);
      builder.add_quadratic(b, c, -w.mu_restart);
      builder.add_quadratic(a, b, w.mu_restart);
    }
  }
  return builder.build();
}

QuboModel penalty_monotonicity_approx(const VariableLayout& layout,
                                      const Dataset& ds, double mu1) {
  if (ds.n() != layout.n)
    throw std::invalid_argument("monotonicity: dataset/layout size mismatch");

  std::vector<int> defaulted, clean;
  for (int i = 1; i <= layout.n; ++i)
    (ds.defaults()[i - 1] ? defaulted : clean).push_back(i);

  QuboBuilder builder(layout.total_variables());
  // d_{i1 i2} = d_i1 - d_i2 is nonzero only across the two groups.
  for (int j = 1; j < layout.m; ++j) {
    for (int i1 : defaulted)
      for (int i2 : clean) // d = +1
        builder.add_quadratic(layout.x_index(i1, j), layout.x_index(i2, j + 1),
                              mu1);
    for (int i1 : clean)
      for (int i2 : defaulted) // d = -1
        builder.add_quadratic(layout.x_index(i1, j), layout.x_index(i2, j + 1),
                              -mu1);
  }
  return builder.build();
}

MonotonePairTable::MonotonePairTable(const VariableLayout& layout,
                                     const Dataset& ds)
    : m_(layout.m) {
  if (!layout.exact_monotonicity)
    throw std::invalid_argument("pair table: layout lacks exact monotonicity");
  if (ds.n() != layout.n || ds.default_count() != layout.default_count)
    throw std::invalid_argument("pair table: dataset/layout mismatch");

  for (int i1 = 1; i1 <= layout.n; ++i1)
    for (int i2 = 1; i2 <= layout.n; ++i2) {
      if (ds.defaults()[i1 - 1] == ds.defaults()[i2 - 1]) continue;
      for (int j = 1; j < layout.m; ++j)
        triples_.push_back({i1, i2, j});
    }
  std::sort(triples_.begin(), triples_.end());
}

int MonotonePairTable::rank(int i1, int i2, int j) const {
  const std::array<int, 3> key{i1, i2, j};
  auto it = std::lower_bound(triples_.begin(), triples_.end(), key);
  if (it == triples_.end() || *it != key)
    throw std::invalid_argument("pair table: triple (" + std::to_string(i1) +
                                ", " + std::to_string(i2) + ", " +
                                std::to_string(j) + ") is not linearized");
  return static_cast<int>(it - triples_.begin());
}

QuboModel penalty_monotonicity_exact(const VariableLayout& layout,
                                     const Dataset& ds, double lambda0,
                                     double lambda) {
  if (!(lambda0 > 0.0 && lambda > 0.0))
    throw std::invalid_argument("monotonicity_exact: weights must be > 0");
  MonotonePairTable table(layout, ds);

  QuboBuilder builder(layout.total_variables());

  // Rosenberg gadget per linearized product: y = x_{i1 j} x_{i2 j+1}.
  for (int r = 0; r < table.size(); ++r) {
    const auto [i1, i2, j] = table.triples()[r];
    const int xa = layout.x_index(i1, j);
    const int xb = layout.x_index(i2, j + 1);
    const int y = layout.y_offset() + r;
    builder.add_quadratic(xa, xb, lambda0);
    builder.add_linear(y, 3.0 * lambda0);
    builder.add_quadratic(xa, y, -2.0 * lambda0);
    builder.add_quadratic(xb, y, -2.0 * lambda0);
  }

  // Squared slack-completed form per grade pair, linear in y:
  // (sum_{C-} y_{(i2,i1,j)} - sum_{C-} y_{(i1,i2,j)} + S_j)^2. A triple whose
  // first counterpart defaulted carries +1, the mirrored triple -1.
  for (int j = 1; j < layout.m; ++j) {
    std::vector<std::pair<int, long long>> coeffs;
    for (int r = 0; r < table.size(); ++r) {
      const auto [i1, i2, jj] = table.triples()[r];
      if (jj != j) continue;
      coeffs.emplace_back(layout.y_offset() + r,
                          ds.defaults()[i1 - 1] ? +1 : -1);
    }
    for (int l = 0; l < layout.slack_mono_width; ++l)
      coeffs.emplace_back(layout.slack_mono_index(l, j), 1LL << l);
    expand_square(builder, coeffs, 0, lambda);
  }
  return builder.build();
}

QuboModel penalty_concentration(const VariableLayout& layout, double mu3) {
  const int n = layout.n;
  const int m = layout.m;
  const double c = mu3 * m / ((m - 1.0) * static_cast<double>(n) * n);

  QuboBuilder builder(layout.total_variables());
  builder.add_offset(-mu3 / (m - 1.0));
  for (int j = 1; j <= m; ++j)
    for (int i1 = 1; i1 <= n; ++i1) {
      builder.add_linear(layout.x_index(i1, j), c); // ordered pair (i1, i1)
      for (int i2 = i1 + 1; i2 <= n; ++i2)
        builder.add_quadratic(layout.x_index(i1, j), layout.x_index(i2, j),
                              2.0 * c);
    }
  return builder.build();
}

QuboModel penalty_cardinality(const VariableLayout& layout, double mu41,
                              double mu42) {
  if (!layout.include_thresholds)
    throw std::invalid_argument("cardinality: layout lacks threshold slacks");

  QuboBuilder builder(layout.total_variables());
  for (int j = 1; j <= layout.m; ++j) {
    // lambda1 <= N_j:  (sum_i x_ij - S1_j - lambda1)^2
    std::vector<std::pair<int, long long>> lower;
    for (int i = 1; i <= layout.n; ++i)
      lower.emplace_back(layout.x_index(i, j), +1);
    for (int l = 0; l < layout.slack1_width; ++l)
      lower.emplace_back(layout.slack1_index(l, j), -(1LL << l));
    expand_square(builder, lower, layout.lambda1, mu41);

    // N_j <= lambda2:  (sum_i x_ij + S2_j - lambda2)^2
    std::vector<std::pair<int, long long>> upper;
    for (int i = 1; i <= layout.n; ++i)
      upper.emplace_back(layout.x_index(i, j), +1);
    for (int l = 0; l < layout.slack2_width; ++l)
      upper.emplace_back(layout.slack2_index(l, j), 1LL << l);
    expand_square(builder, upper, layout.lambda2, mu42);
  }
  return builder.build();
}

QuboModel compose(const VariableLayout& layout, const PenaltyWeights& weights,
                  const Dataset& ds, const ComposeOptions& options) {
  QuboBuilder builder(layout.total_variables());

  if (options.logical == LogicalEncoding::global)
    builder.add_model(penalty_logical_global(layout, weights));
  else
    builder.add_model(
        penalty_logical_local(layout, LocalLogicalWeights::from(weights)));

  switch (options.monotonicity) {
    case MonotonicityEncoding::none:
      break;
    case MonotonicityEncoding::approximate:
      builder.add_model(penalty_monotonicity_approx(layout, ds, weights.mu1));
      break;
    case MonotonicityEncoding::exact:
      if (!layout.exact_monotonicity)
        throw std::invalid_argument(
            "compose: exact monotonicity requested without a layout carrying "
            "the y/slack blocks");
      builder.add_model(penalty_monotonicity_exact(
          layout, ds, weights.rosenberg_lambda0, weights.exact_lambda));
      break;
  }

  if (options.concentration)
    builder.add_model(penalty_concentration(layout, weights.mu3));

  if (options.cardinality && layout.include_thresholds)
    builder.add_model(penalty_cardinality(layout, weights.mu41, weights.mu42));

  return builder.build();
}

std::vector<std::uint8_t> partition_to_state(const Partition& p,
                                             const VariableLayout& layout) {
  if (p.total() != layout.n)
    throw std::invalid_argument("partition_to_state: size mismatch");
  if (p.m() != layout.m)
    throw std::invalid_argument("partition_to_state: grade count mismatch");
  std::vector<std::uint8_t> state(layout.total_variables(), 0);
  int i = 1;
  for (int j = 1; j <= p.m(); ++j)
    for (int k = 0; k < p.cardinalities()[j - 1]; ++k, ++i)
      state[layout.x_index(i, j)] = 1;
  return state;
}

namespace {

void write_register(std::vector<std::uint8_t>& state, long long value, int width,
                    auto index_of) {
  const long long max = (1LL << width) - 1;
  value = std::clamp(value, 0LL, max);
  for (int l = 0; l < width; ++l)
    state[index_of(l)] = static_cast<std::uint8_t>((value >> l) & 1);
}

} // namespace

void complete_threshold_slacks(std::vector<std::uint8_t>& state,
                               const VariableLayout& layout) {
  if (!layout.include_thresholds) return;
  for (int j = 1; j <= layout.m; ++j) {
    long long count = 0;
    for (int i = 1; i <= layout.n; ++i) count += state[layout.x_index(i, j)];
    write_register(state, count - layout.lambda1, layout.slack1_width,
                   [&](int l) { return layout.slack1_index(l, j); });
    write_register(state, layout.lambda2 - count, layout.slack2_width,
                   [&](int l) { return layout.slack2_index(l, j); });
  }
}

void complete_exact_monotonicity_bits(std::vector<std::uint8_t>& state,
                                      const VariableLayout& layout,
                                      const Dataset& ds) {
  if (!layout.exact_monotonicity) return;
  MonotonePairTable table(layout, ds);

  for (int r = 0; r < table.size(); ++r) {
    const auto [i1, i2, j] = table.triples()[r];
    state[layout.y_offset() + r] =
        state[layout.x_index(i1, j)] & state[layout.x_index(i2, j + 1)];
  }

  // S_j cancels the signed product sum when the grade pair is monotone.
  for (int j = 1; j < layout.m; ++j) {
    long long signed_sum = 0;
    for (int r = 0; r < table.size(); ++r) {
      const auto [i1, i2, jj] = table.triples()[r];
      if (jj != j) continue;
      signed_sum += (ds.defaults()[i1 - 1] ? +1 : -1) *
                    static_cast<long long>(state[layout.y_offset() + r]);
    }
    write_register(state, -signed_sum, layout.slack_mono_width,
                   [&](int l) { return layout.slack_mono_index(l, j); });
  }
}

} // namespace ratescale
