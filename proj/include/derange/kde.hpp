#pragma once

#include <Eigen/Core>

#include <optional>
#include <utility>

namespace derange {

struct KdeConfig {
  /// Explicit positive bandwidth; unset means Silverman's rule.
  std::optional<double> bandwidth;
  int grid_points = 512;
  /// Grid span; unset means data range padded by 3 bandwidths each side.
  std::optional<std::pair<double, double>> range;
};

struct KdeGrid {
  Eigen::VectorXd grid;
  Eigen::VectorXd density;
  double bandwidth = 0.0;

  /// Trapezoidal integral of the density over the grid.
  double integral() const;
};

/// Silverman's rule: 0.9 * min(sd, IQR/1.34) * n^(-1/5), with the sample
/// standard deviation. Throws when the rule yields zero (no spread).
double silverman_bandwidth(const Eigen::VectorXd& values);

/// Gaussian-kernel density at a single point: (1/(n h)) sum phi((p - v_i)/h).
double kde_at(const Eigen::VectorXd& values, double bandwidth, double point);

KdeGrid kde_density(const Eigen::VectorXd& values, const KdeConfig& cfg = {});

/// Weighted variant for pre-binned data: points carry nonnegative weights
/// that act as multiplicities.
KdeGrid kde_density_weighted(const Eigen::VectorXd& points, const Eigen::VectorXd& weights,
                             const KdeConfig& cfg);

}  // namespace derange
