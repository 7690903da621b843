#pragma once

#include <cstdint>
#include <string>

#include "derange/derangements.hpp"
#include "derange/stats.hpp"
#include "derange/summary.hpp"

namespace derange {

enum class StatisticKind { OlsSlope, PearsonR, Covariance };
enum class TestMode { Exact, MonteCarlo };
enum class TwoSidedCenter { FamilyMean, Zero };

const char* to_string(StatisticKind kind);
const char* to_string(TestMode mode);
StatisticKind statistic_from_name(const std::string& name);  // "slope" | "pearson" | "cov"

/// Exact enumeration is never allowed past this point; the family size would
/// dwarf any feasible run (N(20) is already ~8.9e17).
inline constexpr int kHardExactLimit = 20;

struct TestConfig {
  StatisticKind statistic = StatisticKind::OlsSlope;
  TestMode mode = TestMode::Exact;
  std::uint64_t mc_samples = 100000;  // MonteCarlo only
  std::uint64_t seed = 0;
  std::uint64_t retention_cap = std::uint64_t{1} << 24;
  int histogram_bins = 256;
  int max_exact_n = kDefaultEnumerationCap;
  TwoSidedCenter center = TwoSidedCenter::FamilyMean;
  int threads = 1;
};

struct TestResult {
  double observed = 0.0;
  DistributionSummary family;
  double p_upper = 0.0;
  double p_lower = 0.0;
  double p_two_sided = 0.0;
  double percentile_of_observed = 0.0;
  std::uint64_t family_size = 0;
  TestMode mode = TestMode::Exact;
  std::uint64_t seed = 0;
  StatisticKind statistic = StatisticKind::OlsSlope;
  double two_sided_center = 0.0;
};

double evaluate_statistic(const PairedSample& s, StatisticKind kind);

/// Exact mean of the statistic over the uniform derangement family:
/// -statistic(s)/(n-1). Each off-diagonal placement is equally likely, so
/// E[x at position i] = (n*mean(x) - x_i)/(n-1), and the statistic's
/// dot-product form turns that into the stated proportionality.
double expected_family_mean(const PairedSample& s, StatisticKind kind);

/// Mid-rank percentile of `observed` within the accumulated family:
/// 100 * (#below + 0.5 * #equal) / count.
double percentile_of(const DistributionSummary& summary, double observed);

/// Distributes the chosen statistic over the derangement family of the
/// x-column (y stays fixed) and tests the observed pairing against it.
/// Exact mode enumerates all N(n) members; Monte Carlo draws mc_samples
/// uniform members. Deterministic for a fixed config, including under any
/// thread count.
TestResult derangement_test(const PairedSample& s, const TestConfig& cfg);

}  // namespace derange
