#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "ratescale/qubo.hpp"

using namespace ratescale;

namespace {

// Independent dense-algebra oracle: x^T Q x + q with Q the symmetric matrix
// holding half of each pair coefficient on both triangles.
double dense_evaluate(const QuboModel& model, const std::vector<std::uint8_t>& x) {
  const int d = model.dimension;
  std::vector<double> q(static_cast<std::size_t>(d) * d, 0.0);
  for (const auto& [i, c] : model.linear) q[i * d + i] += c;
  for (const auto& [i, j, c] : model.quadratic) {
    q[i * d + j] += c / 2.0;
    q[j * d + i] += c / 2.0;
  }
  double e = model.offset;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      e += q[i * d + j] * x[i] * x[j];
  return e;
}

QuboModel random_model(std::mt19937_64& rng, int dim, double density) {
  std::uniform_real_distribution<double> coeff(-3.0, 3.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  QuboBuilder builder(dim);
  builder.add_offset(coeff(rng));
  for (int i = 0; i < dim; ++i)
    if (u(rng) < density) builder.add_linear(i, coeff(rng));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (u(rng) < density) builder.add_quadratic(i, j, coeff(rng));
  return builder.build();
}

} // namespace

TEST_CASE("builder canonicalizes and prunes") {
  QuboBuilder builder(4);
  builder.add_offset(1.5);
  builder.add_quadratic(2, 0, 3.0);  // swapped to (0, 2)
  builder.add_quadratic(0, 2, -1.0); // merges
  builder.add_quadratic(1, 1, 4.0);  // diagonal folds into linear
  builder.add_linear(3, 2.0);
  builder.add_linear(3, -2.0); // cancels to zero, pruned
  const auto model = builder.build();

  CHECK(model.offset == 1.5);
  REQUIRE(model.quadratic.size() == 1);
  CHECK(std::get<0>(model.quadratic[0]) == 0);
  CHECK(std::get<1>(model.quadratic[0]) == 2);
  CHECK(std::get<2>(model.quadratic[0]) == 2.0);
  REQUIRE(model.linear.size() == 1);
  CHECK(model.linear[0] == std::pair<int, double>{1, 4.0});
}

TEST_CASE("evaluate basics") {
  QuboBuilder builder(3);
  builder.add_offset(7.0);
  builder.add_linear(1, 2.5);
  builder.add_quadratic(0, 2, -4.0);
  const auto model = builder.build();

  CHECK(model.evaluate(std::vector<std::uint8_t>{0, 0, 0}) == 7.0);
  CHECK(model.evaluate(std::vector<std::uint8_t>{0, 1, 0}) == 9.5);
  CHECK(model.evaluate(std::vector<std::uint8_t>{1, 0, 1}) == 3.0);
  CHECK_THROWS(model.evaluate(std::vector<std::uint8_t>{0, 0}));
}

TEST_CASE("evaluate matches the dense matrix oracle") {
  std::mt19937_64 rng(20240517);
  for (int trial = 0; trial < 25; ++trial) {
    const auto model = random_model(rng, 12, 0.4);
    std::vector<std::uint8_t> x(12);
    for (auto& bit : x) bit = static_cast<std::uint8_t>(rng() & 1);
    const double expected = dense_evaluate(model, x);
    CHECK(model.evaluate(x) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("qubo file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "ratescale_model.qubo";
  std::mt19937_64 rng(99);
  const auto model = random_model(rng, 17, 0.3);
  save_qubo(model, path);
  const auto loaded = load_qubo(path);
  CHECK(loaded.dimension == model.dimension);
  CHECK(loaded.offset == model.offset); // bit-exact round trip
  CHECK(loaded.linear == model.linear);
  CHECK(loaded.quadratic == model.quadratic);
  std::filesystem::remove(path);
}

TEST_CASE("qubo file offset-only and normalization") {
  const auto path = std::filesystem::temp_directory_path() / "ratescale_tiny.qubo";
  {
    QuboBuilder builder(5);
    builder.add_offset(-2.25);
    save_qubo(builder.build(), path);
    const auto loaded = load_qubo(path);
    CHECK(loaded.dimension == 5);
    CHECK(loaded.offset == -2.25);
    CHECK(loaded.linear.empty());
    CHECK(loaded.quadratic.empty());
  }
  {
    std::ofstream out(path);
    out << "qubo v1 dim=4 offset=0\nQ 3 1 2.5\n"; // reversed pair
  }
  const auto loaded = load_qubo(path);
  REQUIRE(loaded.quadratic.size() == 1);
  CHECK(std::get<0>(loaded.quadratic[0]) == 1);
  CHECK(std::get<1>(loaded.quadratic[0]) == 3);
  std::filesystem::remove(path);
}

TEST_CASE("qubo file rejects malformed input") {
  const auto path = std::filesystem::temp_directory_path() / "ratescale_bad.qubo";
  auto write = [&](const char* text) {
    std::ofstream out(path);
    out << text;
  };
  write("qubo v2 dim=3 offset=0\n");
  CHECK_THROWS(load_qubo(path));
  write("qubo v1 dim=3 offset=0\nL 7 1.0\n"); // index out of range
  CHECK_THROWS(load_qubo(path));
  write("qubo v1 dim=3 offset=0\nL 1 abc\n");
  CHECK_THROWS(load_qubo(path));
  write("qubo v1 dim=3 offset=0\nX 1 2\n");
  CHECK_THROWS(load_qubo(path));
  std::filesystem::remove(path);
}

TEST_CASE("layout widths reproduce the worked examples") {
  // floor(1 + log2(3)) = 2 and floor(1 + log2(2)) = 2 for n=4, m=3.
  LayoutOptions opt;
  opt.lambda1 = 1;
  opt.lambda2 = 2;
  const auto layout = VariableLayout::create(4, 3, opt);
  CHECK(layout.slack1_width == 2);
  CHECK(layout.slack2_width == 2);
  CHECK(layout.total_variables() == 12 + 3 * (2 + 2));
}

TEST_CASE("layout totals: 24 plain and 45 with exact monotonicity") {
  LayoutOptions plain;
  plain.include_thresholds = false;
  CHECK(VariableLayout::create(8, 3, plain).total_variables() == 24);

  LayoutOptions exact;
  exact.include_thresholds = false;
  exact.exact_monotonicity = true;
  exact.default_count = 2;
  const auto layout = VariableLayout::create(5, 3, exact);
  CHECK(layout.y_count() == 24);          // 2*(m-1)*(n-d)*d
  CHECK(layout.slack_mono_width == 3);    // floor(1 + log2(6))
  CHECK(layout.total_variables() == 45);  // 15 + 24 + 6
}

TEST_CASE("layout defaults and feasibility errors") {
  const auto layout = VariableLayout::create(150, 9);
  CHECK(layout.lambda1 == 1);
  CHECK(layout.lambda2 == 23);
  CHECK(layout.slack1_width == 8); // floor(1 + log2(149))
  CHECK(layout.slack2_width == 5); // floor(1 + log2(23))
  CHECK(layout.total_variables() == 150 * 9 + 9 * 13);

  CHECK_THROWS(VariableLayout::create(10, 1));
  CHECK_THROWS(VariableLayout::create(3, 4));

  LayoutOptions infeasible_low;
  infeasible_low.lambda1 = 6;
  infeasible_low.lambda2 = 8;
  CHECK_THROWS_WITH_AS(VariableLayout::create(10, 2, infeasible_low),
                       doctest::Contains("m*lambda1"), std::invalid_argument);

  LayoutOptions infeasible_high;
  infeasible_high.lambda1 = 1;
  infeasible_high.lambda2 = 4;
  CHECK_THROWS_WITH_AS(VariableLayout::create(10, 2, infeasible_high),
                       doctest::Contains("m*lambda2"), std::invalid_argument);

  LayoutOptions bad_exact;
  bad_exact.exact_monotonicity = true;
  bad_exact.default_count = 0;
  CHECK_THROWS(VariableLayout::create(10, 2, bad_exact));
}

TEST_CASE("layout block indices are disjoint and dense") {
  LayoutOptions opt;
  opt.lambda1 = 1;
  opt.lambda2 = 4;
  opt.exact_monotonicity = true;
  opt.default_count = 2;
  const auto layout = VariableLayout::create(6, 3, opt);
  std::vector<int> hits(layout.total_variables(), 0);
  for (int i = 1; i <= layout.n; ++i)
    for (int j = 1; j <= layout.m; ++j) ++hits[layout.x_index(i, j)];
  for (int l = 0; l < layout.slack1_width; ++l)
    for (int j = 1; j <= layout.m; ++j) ++hits[layout.slack1_index(l, j)];
  for (int l = 0; l < layout.slack2_width; ++l)
    for (int j = 1; j <= layout.m; ++j) ++hits[layout.slack2_index(l, j)];
  for (int y = 0; y < layout.y_count(); ++y) ++hits[layout.y_offset() + y];
  for (int l = 0; l < layout.slack_mono_width; ++l)
    for (int j = 1; j < layout.m; ++j) ++hits[layout.slack_mono_index(l, j)];
  for (int h : hits) CHECK(h == 1);
}
