#ifndef RATESCALE_DATASET_HPP
#define RATESCALE_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace ratescale {

/// Score-ordered counterpart population with binary default flags.
///
/// Counterparts are ordered by ascending risk; index i (1-based in the file
/// format, 0-based in memory) identifies the counterpart. Scores are optional
/// and purely informational: every algorithm in this library consumes only
/// the ordering and the default flags. Immutable after construction.
class Dataset {
public:
  /// Validates lengths and score ordering; throws std::invalid_argument.
  explicit Dataset(std::vector<std::uint8_t> defaults,
                   std::optional<std::vector<double>> scores = std::nullopt);

  int n() const { return static_cast<int>(defaults_.size()); }
  int default_count() const { return default_count_; }
  const std::vector<std::uint8_t>& defaults() const { return defaults_; }

  bool has_scores() const { return scores_.has_value(); }
  const std::vector<double>& scores() const { return *scores_; }

  /// Synthetic dataset with exactly round(n * default_fraction) defaults,
  /// sampled without replacement with logistic-in-rank weights so that
  /// defaults concentrate toward the risky tail. Deterministic per seed.
  static Dataset generate(int n, double default_fraction, std::uint64_t seed);

  /// Same sampling scheme with an explicit default count (used by the
  /// benchmark harness where small n makes a fraction meaningless).
  static Dataset generate_with_default_count(int n, int defaults,
                                             std::uint64_t seed);

  /// Dataset with defaults exactly at the given 1-based positions.
  static Dataset from_default_positions(int n, const std::vector<int>& positions);

  /// CSV round trip. Format: header `index,score,default`, 1-based ascending
  /// index, real score (column optional), default in {0,1}.
  static Dataset load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  bool operator==(const Dataset& other) const = default;

private:
  std::vector<std::uint8_t> defaults_;
  std::optional<std::vector<double>> scores_;
  int default_count_ = 0;
};

} // namespace ratescale

#endif
