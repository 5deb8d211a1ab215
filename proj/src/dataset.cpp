#include "ratescale/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rng.hpp"

namespace ratescale {

namespace {

// Steepness making the top rank decile ~10x more likely than the bottom one.
const double kLogisticSteepness = std::log(10.0) / 0.45;

double logistic_weight(int i, int n) {
  const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return 1.0 / (1.0 + std::exp(-kLogisticSteepness * (u - 0.5)));
}

} // namespace

Dataset::Dataset(std::vector<std::uint8_t> defaults,
                 std::optional<std::vector<double>> scores)
    : defaults_(std::move(defaults)), scores_(std::move(scores)) {
  if (defaults_.empty())
    throw std::invalid_argument("dataset: empty default vector");
  for (auto d : defaults_) {
    if (d > 1) throw std::invalid_argument("dataset: default flags must be 0 or 1");
    default_count_ += d;
  }
  if (scores_) {
    if (scores_->size() != defaults_.size())
      throw std::invalid_argument("dataset: score/default length mismatch");
    if (!std::is_sorted(scores_->begin(), scores_->end()))
      throw std::invalid_argument(
          "dataset: scores must be non-decreasing (ascending risk order)");
  }
}

Dataset Dataset::generate(int n, double default_fraction, std::uint64_t seed) {
  if (!(default_fraction > 0.0 && default_fraction < 1.0))
    throw std::invalid_argument("generate: default_fraction must be in (0,1)");
  const int defaults = static_cast<int>(std::lround(n * default_fraction));
  return generate_with_default_count(n, defaults, seed);
}

Dataset Dataset::generate_with_default_count(int n, int defaults,
                                             std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate: n must be at least 2");
  if (defaults < 1 || defaults >= n)
    throw std::invalid_argument(
        "generate: default count " + std::to_string(defaults) +
        " must be in [1, n-1]");

  std::vector<double> weight(n);
  for (int i = 0; i < n; ++i) weight[i] = logistic_weight(i, n);

  // Weighted sampling without replacement by CDF inversion.
  std::vector<std::uint8_t> flags(n, 0);
  detail::Rng rng(detail::derive_seed(seed, 0));
  double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  for (int k = 0; k < defaults; ++k) {
    double r = rng.uniform() * total;
    int chosen = -1;
    for (int i = 0; i < n; ++i) {
      if (flags[i]) continue;
      r -= weight[i];
      if (r < 0.0) {
        chosen = i;
        break;
      }
    }
    if (chosen < 0) { // numeric edge: pick the last remaining
      for (int i = n - 1; i >= 0; --i)
        if (!flags[i]) {
          chosen = i;
          break;
        }
    }
    flags[chosen] = 1;
    total -= weight[chosen];
  }
  return Dataset(std::move(flags));
}

Dataset Dataset::from_default_positions(int n, const std::vector<int>& positions) {
  if (n < 1) throw std::invalid_argument("dataset: n must be positive");
  std::vector<std::uint8_t> flags(n, 0);
  for (int pos : positions) {
    if (pos < 1 || pos > n)
      throw std::invalid_argument("dataset: default position " +
                                  std::to_string(pos) + " outside [1, " +
                                  std::to_string(n) + "]");
    if (flags[pos - 1])
      throw std::invalid_argument("dataset: duplicate default position " +
                                  std::to_string(pos));
    flags[pos - 1] = 1;
  }
  return Dataset(std::move(flags));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

} // namespace

Dataset Dataset::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("dataset: empty file " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  bool with_scores;
  if (line == "index,score,default") {
    with_scores = true;
  } else if (line == "index,default") {
    with_scores = false;
  } else {
    throw std::runtime_error("dataset: unrecognized header '" + line + "'");
  }

  std::vector<std::uint8_t> flags;
  std::vector<double> scores;
  int expected_index = 1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    const std::size_t want = with_scores ? 3u : 2u;
    if (fields.size() != want)
      throw std::runtime_error("dataset: malformed row '" + line + "'");
    try {
      if (std::stoi(fields[0]) != expected_index)
        throw std::runtime_error("dataset: non-consecutive index in row '" +
                                 line + "'");
      if (with_scores) scores.push_back(std::stod(fields[1]));
      const std::string& dv = fields.back();
      if (dv == "0")
        flags.push_back(0);
      else if (dv == "1")
        flags.push_back(1);
      else
        throw std::runtime_error("dataset: default value '" + dv +
                                 "' is not 0 or 1");
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("dataset: malformed row '" + line + "'");
    }
    ++expected_index;
  }
  if (flags.empty()) throw std::runtime_error("dataset: no data rows");
  try {
    if (with_scores) return Dataset(std::move(flags), std::move(scores));
    return Dataset(std::move(flags));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("dataset: ") + e.what());
  }
}

void Dataset::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dataset: cannot write " + path.string());
  if (has_scores()) {
    out << "index,score,default\n";
    out.precision(17);
    for (int i = 0; i < n(); ++i)
      out << (i + 1) << ',' << (*scores_)[i] << ',' << int(defaults_[i]) << '\n';
  } else {
    out << "index,default\n";
    for (int i = 0; i < n(); ++i)
      out << (i + 1) << ',' << int(defaults_[i]) << '\n';
  }
}

} // namespace ratescale
