#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <utility>

#include "derange/errors.hpp"

namespace derange {

/// Soft cap for exhaustive enumeration; beyond it the family size grows past
/// 10^9 quickly (176,214,841 members already at n = 12).
inline constexpr int kDefaultEnumerationCap = 12;

/// Largest n whose derangement count fits in 128 bits.
inline constexpr int kMaxCountArgument = 34;

/// Exact number of fixed-point-free permutations of {1..n}.
struct DerangementCount {
  int n = 0;
  unsigned __int128 value = 0;

  std::string str() const;
  double as_double() const { return static_cast<double>(value); }
};

/// N(n) by the recurrence N(n) = (n-1)(N(n-1) + N(n-2)), N(1) = 0, N(2) = 1.
/// Throws SizeRefusalError for n > 34 (exceeds the 128-bit exact range).
DerangementCount count_derangements(int n);

/// True iff `mapping` (1-based values) is a permutation of {1..n} with no
/// entry equal to its own position. Malformed input returns false.
bool is_derangement(std::span<const int> mapping);
bool is_derangement(const Eigen::VectorXi& mapping);

/// Uniform draw over all derangements of {1..n}: unbiased shuffle, rejected
/// until fixed-point-free. Acceptance rate tends to 1/e, so under three
/// attempts per draw on average.
Eigen::VectorXi sample_derangement(int n, std::mt19937_64& rng);

/// Deterministic generator for logical stream `stream` of a master seed.
std::mt19937_64 substream_rng(std::uint64_t seed, std::uint64_t stream);

namespace detail {

std::uint64_t splitmix64(std::uint64_t& state);

/// Unbiased draw from {0, ..., bound-1}.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

template <class Visitor>
bool emit(const Eigen::VectorXi& mapping, Visitor& visit) {
  if constexpr (std::is_void_v<std::invoke_result_t<Visitor&, const Eigen::VectorXi&>>) {
    visit(mapping);
    return true;
  } else {
    // A bool-returning visitor stops enumeration by returning false.
    return static_cast<bool>(visit(mapping));
  }
}

// Fills positions pos..n with the unused values in increasing order, skipping
// fixed points; the ascending value loop yields lexicographic output.
template <class Visitor>
bool extend_mapping(int n, int pos, std::uint64_t used, Eigen::VectorXi& mapping,
                    std::uint64_t& visited, Visitor& visit) {
  if (pos > n) {
    ++visited;
    return emit(mapping, visit);
  }
  for (int value = 1; value <= n; ++value) {
    if (value == pos) continue;
    const std::uint64_t bit = std::uint64_t{1} << value;
    if (used & bit) continue;
    mapping[pos - 1] = value;
    if (!extend_mapping(n, pos + 1, used | bit, mapping, visited, visit)) return false;
  }
  return true;
}

void check_enumeration_size(int n, int max_n);

}  // namespace detail

/// Visits every derangement of {1..n} with mapping[0] == first_value (1-based,
/// first_value != 1), in lexicographic order. Returns the number visited.
/// The full family partitions into these n-1 independent sub-enumerations.
template <class Visitor>
std::uint64_t enumerate_derangements_with_first(int n, int first_value, Visitor&& visit) {
  if (n < 2) throw DomainError("enumerate_derangements: n must be >= 2 for a partition");
  if (first_value < 2 || first_value > n)
    throw DomainError("enumerate_derangements: first value must lie in {2..n}");
  Eigen::VectorXi mapping(n);
  mapping[0] = first_value;
  std::uint64_t visited = 0;
  detail::extend_mapping(n, 2, std::uint64_t{1} << first_value, mapping, visited, visit);
  return visited;
}

/// Visits every derangement of {1..n} exactly once, in lexicographic order of
/// the mapping sequence. Returns the number visited (= N(n)). n = 1 visits
/// nothing; n above `max_n` is refused with the family size in the message.
template <class Visitor>
std::uint64_t enumerate_derangements(int n, Visitor&& visit, int max_n = kDefaultEnumerationCap) {
  if (n < 1) throw DomainError("enumerate_derangements: n must be >= 1");
  detail::check_enumeration_size(n, max_n);
  if (n == 1) return 0;
  Eigen::VectorXi mapping(n);
  std::uint64_t visited = 0;
  detail::extend_mapping(n, 1, 0, mapping, visited, visit);
  return visited;
}

}  // namespace derange
