#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace derange {

struct SwResult {
  double w = 0.0;
  double p_value = 0.0;
  int n_used = 0;
  bool subsampled = false;
};

/// Normality test returning the W statistic and Royston's p-value
/// approximation, valid for 3 <= n <= 5000. Larger inputs are reduced to a
/// deterministic 5000-value subsample driven by `seed`, and the result is
/// flagged as subsampled. Requires at least 3 values with nonzero spread.
SwResult shapiro_wilk(const Eigen::VectorXd& values, std::uint64_t seed = 0);

inline constexpr int kShapiroWilkMaxN = 5000;

}  // namespace derange
