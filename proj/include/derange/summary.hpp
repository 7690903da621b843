#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "derange/errors.hpp"

namespace derange {

struct SummaryConfig {
  /// Values are retained in full only while count stays at or below this.
  std::uint64_t retention_cap = std::uint64_t{1} << 24;
  int histogram_bins = 256;
  /// When set, histogram counts stream into fixed bins over this range
  /// (values outside are clamped into the edge bins). When unset, the
  /// histogram is derived from retained values over their [min, max].
  std::optional<std::pair<double, double>> histogram_range;
  /// Reference for the one-sided tail counters.
  double observed_ref = 0.0;
  /// Center for the two-sided counter |value - center| >= |observed_ref - center|.
  double two_sided_center = 0.0;
};

/// Single-writer streaming accumulator over a family of statistic values:
/// Welford moments, extremes, exact tail counters, optional retained values,
/// optional fixed-range histogram. Partial summaries merge losslessly
/// (counters) and stably (Chan's moment combination); merging in a fixed
/// order makes parallel reductions reproducible for any worker count.
class DistributionSummary {
 public:
  DistributionSummary() = default;
  explicit DistributionSummary(SummaryConfig cfg);

  void add(double value);
  void merge(const DistributionSummary& other);

  std::uint64_t count() const { return count_; }
  double mean() const;
  double variance() const;  // population convention
  double stddev() const;
  double min() const;
  double max() const;

  std::uint64_t ge_observed() const { return ge_; }
  std::uint64_t le_observed() const { return le_; }
  std::uint64_t abs_ge_observed() const { return abs_ge_; }

  bool retained_complete() const { return retained_complete_; }
  const std::vector<double>& retained() const { return retained_; }

  bool has_histogram() const;
  /// Bin counts; sums to count() whenever a histogram is available.
  std::vector<std::uint64_t> histogram() const;
  std::pair<double, double> histogram_bounds() const;

  const SummaryConfig& config() const { return cfg_; }

 private:
  void require_nonempty(const char* op) const;

  SummaryConfig cfg_;
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
  double abs_observed_dev_ = 0.0;
  std::uint64_t ge_ = 0;
  std::uint64_t le_ = 0;
  std::uint64_t abs_ge_ = 0;
  std::vector<std::uint64_t> bins_;
  std::vector<double> retained_;
  bool retained_complete_ = true;
};

}  // namespace derange
