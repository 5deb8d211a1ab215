#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ratescale/dataset.hpp"

using ratescale::Dataset;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("generate places the requested default count") {
  const auto ds = Dataset::generate(150, 0.04, 7);
  CHECK(ds.n() == 150);
  CHECK(ds.default_count() == 6); // round(150 * 0.04)

  const auto ds2 = Dataset::generate(150, 0.12, 3);
  CHECK(ds2.default_count() == 18);
}

TEST_CASE("generate concentrates defaults toward high indices") {
  // Logistic-in-rank weights: across seeds, the mean default index must sit
  // well above the middle of the population.
  double mean_index = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ds = Dataset::generate(150, 0.04, seed);
    CHECK(ds.default_count() == 6); // exactly round(n * fraction), every seed
    for (int i = 0; i < ds.n(); ++i)
      if (ds.defaults()[i]) {
        mean_index += i;
        ++count;
      }
  }
  mean_index /= count;
  CHECK(mean_index > 90.0); // uniform sampling would hover near 74.5
}

TEST_CASE("generate is deterministic per seed") {
  const auto a = Dataset::generate(80, 0.1, 42);
  const auto b = Dataset::generate(80, 0.1, 42);
  CHECK(a == b);
  const auto c = Dataset::generate(80, 0.1, 43);
  CHECK(a != c);
}

TEST_CASE("generate rejects degenerate inputs") {
  CHECK_THROWS(Dataset::generate(1, 0.5, 0));
  CHECK_THROWS(Dataset::generate(100, 0.001, 0)); // rounds to 0 defaults
  CHECK_THROWS(Dataset::generate(100, 0.999, 0)); // rounds to n defaults
  CHECK_THROWS(Dataset::generate(100, 0.0, 0));
  CHECK_THROWS(Dataset::generate(100, 1.0, 0));
}

TEST_CASE("from_default_positions") {
  const auto ds = Dataset::from_default_positions(13, {10, 11, 13});
  CHECK(ds.default_count() == 3);
  CHECK(ds.defaults()[9] == 1);
  CHECK(ds.defaults()[10] == 1);
  CHECK(ds.defaults()[12] == 1);
  CHECK(ds.defaults()[0] == 0);

  const auto ds2 = Dataset::from_default_positions(14, {11, 13, 14});
  CHECK(ds2.default_count() == 3);

  const auto empty = Dataset::from_default_positions(5, {});
  CHECK(empty.default_count() == 0);

  CHECK_THROWS(Dataset::from_default_positions(5, {6}));
  CHECK_THROWS(Dataset::from_default_positions(5, {0}));
  CHECK_THROWS(Dataset::from_default_positions(5, {2, 2}));
}

TEST_CASE("csv round trip") {
  const auto path = temp_file("ratescale_ds_roundtrip.csv");
  const auto ds = Dataset::generate(20, 0.1, 1);
  ds.save(path);
  CHECK(Dataset::load(path) == ds);

  std::vector<double> scores(20);
  for (int i = 0; i < 20; ++i) scores[i] = 0.1 * i;
  const Dataset with_scores(ds.defaults(), scores);
  with_scores.save(path);
  CHECK(Dataset::load(path) == with_scores);
  std::filesystem::remove(path);
}

TEST_CASE("csv rejects invalid content") {
  const auto path = temp_file("ratescale_ds_invalid.csv");
  {
    std::ofstream out(path);
    out << "index,default\n1,0\n2,2\n";
  }
  CHECK_THROWS(Dataset::load(path));
  {
    std::ofstream out(path);
    out << "index,score,default\n1,5.0,0\n2,4.0,1\n"; // descending scores
  }
  CHECK_THROWS(Dataset::load(path));
  {
    std::ofstream out(path);
    out << "index,default\n1\n";
  }
  CHECK_THROWS(Dataset::load(path));
  {
    std::ofstream out(path);
    out << "count;flag\n";
  }
  CHECK_THROWS(Dataset::load(path));
  std::filesystem::remove(path);
}
