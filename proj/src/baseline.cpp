#include "ratescale/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "parallel.hpp"
#include "rng.hpp"

namespace ratescale {

bool next_composition(std::vector<int>& parts) {
  const int m = static_cast<int>(parts.size());
  int suffix_sum = parts[m - 1];
  int k = m - 2;
  for (; k >= 0; --k) {
    if (suffix_sum >= m - k) break; // suffix can spare one unit for position k
    suffix_sum += parts[k];
  }
  if (k < 0) return false;
  parts[k] += 1;
  for (int t = k + 1; t < m - 1; ++t) parts[t] = 1;
  parts[m - 1] = suffix_sum - 1 - (m - 2 - k);
  return true;
}

BigUint count_configurations(int n, int m) {
  if (m < 2 || m > n)
    throw std::invalid_argument("count_configurations: need 2 <= m <= n");
  BigUint result = 1;
  // binomial(n-1, m-1) multiplicatively; exact at every step.
  const int k = std::min(m - 1, n - m);
  for (int i = 1; i <= k; ++i) {
    result *= (n - 1 - k + i);
    result /= i;
  }
  return result;
}

double log_count_configurations(int n, int m) {
  if (m < 2 || m > n)
    throw std::invalid_argument("log_count_configurations: need 2 <= m <= n");
  return std::lgamma(n) - std::lgamma(m) - std::lgamma(n - m + 1);
}

CompositionEnumerator::CompositionEnumerator(int n, int m) : n_(n), m_(m) {
  if (m < 2 || m > n)
    throw std::invalid_argument("compositions: need 2 <= m <= n");
}

void CompositionEnumerator::reset() {
  done_ = false;
  first_ = true;
  current_.clear();
}

bool CompositionEnumerator::next(std::vector<int>& out) {
  if (done_) return false;
  if (first_) {
    current_.assign(m_, 1);
    current_.back() = n_ - (m_ - 1);
    first_ = false;
    out = current_;
    return true;
  }
  if (!next_composition(current_)) {
    done_ = true;
    return false;
  }
  out = current_;
  return true;
}

std::vector<int> CompositionEnumerator::unrank(int n, int m, std::uint64_t rank) {
  if (m < 2 || m > n)
    throw std::invalid_argument("compositions: need 2 <= m <= n");
  std::vector<int> parts(m);
  int remaining = n;
  for (int pos = 0; pos < m - 1; ++pos) {
    const int parts_left = m - pos - 1;
    for (int value = 1;; ++value) {
      // Compositions of (remaining - value) into parts_left positive parts.
      if (remaining - value < parts_left)
        throw std::out_of_range("compositions: rank out of range");
      const BigUint below =
          parts_left == 1
              ? BigUint(1)
              : count_configurations(remaining - value, parts_left);
      if (BigUint(rank) < below) {
        parts[pos] = value;
        remaining -= value;
        break;
      }
      rank -= below.convert_to<std::uint64_t>();
    }
  }
  parts[m - 1] = remaining;
  return parts;
}

namespace {

struct PrefixDefaults {
  std::vector<int> cumulative; // cumulative[i] = defaults among the first i

  explicit PrefixDefaults(const Dataset& ds) : cumulative(ds.n() + 1, 0) {
    for (int i = 0; i < ds.n(); ++i)
      cumulative[i + 1] = cumulative[i] + ds.defaults()[i];
  }
};

bool passes_all(const Dataset& ds, const std::vector<int>& parts,
                const PrefixDefaults& prefix, const BruteForceConfig& config,
                int lambda1, int lambda2, std::uint64_t rank,
                std::vector<GradeStats>& stats_buffer) {
  const int m = static_cast<int>(parts.size());

  stats_buffer.clear();
  int boundary = 0;
  for (int j = 0; j < m; ++j) {
    const int next = boundary + parts[j];
    const int d = prefix.cumulative[next] - prefix.cumulative[boundary];
    stats_buffer.push_back({parts[j], d, static_cast<double>(d) / parts[j]});
    boundary = next;
  }

  if (config.monotonicity && !check_monotonicity(stats_buffer)) return false;

  if (config.heterogeneity) {
    for (int j = 0; j + 1 < m; ++j) {
      const auto t = t_test_heterogeneity(stats_buffer[j], stats_buffer[j + 1],
                                          config.heterogeneity_alpha);
      if (t.applicable && !t.heterogeneous) return false;
    }
  }

  if (config.concentration) {
    const double n = ds.n();
    double h = 0.0;
    for (int j = 0; j < m; ++j) {
      const double f = parts[j] / n;
      h += f * f;
    }
    const double h_adj = (h - 1.0 / m) / (1.0 - 1.0 / m);
    if (!(h_adj < config.concentration_threshold)) return false;
  }

  if (config.cardinality) {
    for (int j = 0; j < m; ++j)
      if (parts[j] < lambda1 || parts[j] > lambda2) return false;
  }

  if (config.homogeneity) {
    const Partition p(parts);
    for (int j = 0; j < m; ++j) {
      // Seed derived from the rank so results are chunking-independent.
      const auto z = z_test_homogeneity(ds, p, j, config.homogeneity_iterations,
                                        config.homogeneity_alpha,
                                        detail::derive_seed(config.seed, rank));
      if (z.applicable && !z.homogeneous) return false;
    }
  }
  return true;
}

} // namespace

BruteForceResult brute_force_search(const Dataset& ds, int m,
                                    const BruteForceConfig& config) {
  const int n = ds.n();
  const BigUint configurations = count_configurations(n, m);
  const int lambda1 = config.lambda1.value_or(default_lambda1(n));
  const int lambda2 = config.lambda2.value_or(default_lambda2(n));
  const PrefixDefaults prefix(ds);

  BruteForceResult result;
  result.row.n = n;
  result.row.m = m;
  result.row.configurations = configurations;

  const auto start = std::chrono::steady_clock::now();

  if (configurations > BigUint(std::numeric_limits<std::int64_t>::max()))
    throw std::invalid_argument("brute_force_search: composition space too large");
  const std::uint64_t total = configurations.convert_to<std::uint64_t>();
  const int threads = detail::resolve_threads(config.threads);

  if (threads == 1) {
    // Serial reference path: one straight enumeration.
    CompositionEnumerator enumerator(n, m);
    std::vector<int> parts;
    std::vector<GradeStats> stats;
    std::uint64_t rank = 0;
    while (enumerator.next(parts)) {
      if (passes_all(ds, parts, prefix, config, lambda1, lambda2, rank, stats))
        result.valid.emplace_back(parts);
      ++rank;
    }
  } else {
    const std::uint64_t chunk_count =
        std::min<std::uint64_t>(total, static_cast<std::uint64_t>(threads) * 8);
    const std::uint64_t chunk_size = (total + chunk_count - 1) / chunk_count;
    std::vector<std::vector<Partition>> survivors(chunk_count);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunk_count); ++c) {
      const std::uint64_t begin = c * chunk_size;
      const std::uint64_t end = std::min<std::uint64_t>(total, begin + chunk_size);
      if (begin >= end) continue;
      std::vector<int> parts = CompositionEnumerator::unrank(n, m, begin);
      std::vector<GradeStats> stats;
      CompositionEnumerator walker(n, m);
      // Walk in place from the unranked start.
      for (std::uint64_t rank = begin; rank < end; ++rank) {
        if (passes_all(ds, parts, prefix, config, lambda1, lambda2, rank, stats))
          survivors[c].emplace_back(parts);
        if (rank + 1 < end) next_composition(parts);
      }
    }
    for (auto& chunk : survivors)
      for (auto& p : chunk) result.valid.push_back(std::move(p));
  }

  result.row.elapsed = std::chrono::steady_clock::now() - start;
  result.row.valid_count = result.valid.size();
  return result;
}

PowerLawFit fit_power_law(std::span<const BenchmarkRow> rows) {
  std::vector<double> lx, ly;
  for (const auto& row : rows) {
    if (row.elapsed.count() > 0.0) {
      lx.push_back(std::log(row.configurations.convert_to<double>()));
      ly.push_back(std::log(row.elapsed.count()));
    }
  }
  if (lx.size() < 3)
    throw std::invalid_argument("fit_power_law: need at least 3 rows with "
                                "positive times");

  const double k = static_cast<double>(lx.size());
  const double sx = std::accumulate(lx.begin(), lx.end(), 0.0);
  const double sy = std::accumulate(ly.begin(), ly.end(), 0.0);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / k;
  return {std::exp(intercept), slope};
}

std::string benchmark_csv(std::span<const BenchmarkRow> rows) {
  std::ostringstream out;
  out << "n,m,configurations,valid_count,elapsed_seconds\n";
  out.precision(9);
  for (const auto& row : rows)
    out << row.n << ',' << row.m << ',' << row.configurations << ','
        << row.valid_count << ',' << std::fixed << row.elapsed.count() << '\n';
  return out.str();
}

} // namespace ratescale
