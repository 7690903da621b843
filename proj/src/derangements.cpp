#include "derange/derangements.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace derange {

std::string DerangementCount::str() const {
  if (value == 0) return "0";
  std::string digits;
  unsigned __int128 v = value;
  while (v != 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

DerangementCount count_derangements(int n) {
  if (n < 1) throw DomainError("count_derangements: n must be >= 1");
  if (n > kMaxCountArgument)
    throw SizeRefusalError("count_derangements: N(" + std::to_string(n) +
                           ") exceeds the exact 128-bit range (largest supported n is 34)");
  if (n == 1) return {n, 0};
  unsigned __int128 prev2 = 0;  // N(1)
  unsigned __int128 prev1 = 1;  // N(2)
  for (int k = 3; k <= n; ++k) {
    const unsigned __int128 next = static_cast<unsigned __int128>(k - 1) * (prev1 + prev2);
    prev2 = prev1;
    prev1 = next;
  }
  return {n, prev1};
}

bool is_derangement(std::span<const int> mapping) {
  const std::size_t n = mapping.size();
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    const int value = mapping[j];
    if (value < 1 || static_cast<std::size_t>(value) > n) return false;
    if (static_cast<std::size_t>(value) == j + 1) return false;
    if (seen[static_cast<std::size_t>(value - 1)]) return false;
    seen[static_cast<std::size_t>(value - 1)] = true;
  }
  return true;
}

bool is_derangement(const Eigen::VectorXi& mapping) {
  return is_derangement(std::span<const int>(mapping.data(), static_cast<std::size_t>(mapping.size())));
}

Eigen::VectorXi sample_derangement(int n, std::mt19937_64& rng) {
  if (n < 2)
    throw DomainError("sample_derangement: no derangement exists for n = " + std::to_string(n));
  Eigen::VectorXi mapping(n);
  while (true) {
    std::iota(mapping.data(), mapping.data() + n, 1);
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(i) + 1));
      std::swap(mapping[i], mapping[j]);
    }
    bool fixed_point = false;
    for (int j = 0; j < n; ++j) {
      if (mapping[j] == j + 1) {
        fixed_point = true;
        break;
      }
    }
    if (!fixed_point) return mapping;
  }
}

std::mt19937_64 substream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  const std::uint64_t a = detail::splitmix64(state);
  const std::uint64_t b = detail::splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

namespace detail {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  // Reject the biased tail of the 64-bit range instead of relying on
  // std::uniform_int_distribution, whose output is implementation-defined.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % bound;
  std::uint64_t raw;
  do {
    raw = rng();
  } while (raw >= limit);
  return raw % bound;
}

void check_enumeration_size(int n, int max_n) {
  if (n <= max_n && n <= kMaxCountArgument) return;
  std::string cost = n <= kMaxCountArgument
                         ? count_derangements(n).str() + " derangements"
                         : std::string("more than 10^38 derangements");
  throw SizeRefusalError("enumerate_derangements: n = " + std::to_string(n) + " means visiting " +
                         cost + "; raise the cap only if that cost is intended");
}

}  // namespace detail

}  // namespace derange
