#include "derange/kde.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "derange/errors.hpp"

namespace derange {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double quantile_sorted(const std::vector<double>& sorted, double q) {
  // Linear interpolation between order statistics (the common "type 7" rule).
  const auto n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

void validate_grid(const KdeConfig& cfg) {
  if (cfg.grid_points < 2) throw DomainError("kde: need at least 2 grid points");
  if (cfg.bandwidth && !(*cfg.bandwidth > 0.0))
    throw DomainError("kde: explicit bandwidth must be positive");
  if (cfg.range && !(cfg.range->first < cfg.range->second))
    throw DomainError("kde: grid range is inverted");
}

KdeGrid evaluate(const Eigen::VectorXd& points, const Eigen::VectorXd& weights, double h,
                 double lo, double hi, int grid_points) {
  KdeGrid out;
  out.bandwidth = h;
  out.grid = Eigen::VectorXd::LinSpaced(grid_points, lo, hi);
  out.density.resize(grid_points);
  const double total = weights.sum();
  const double norm = kInvSqrt2Pi / (total * h);
  for (int g = 0; g < grid_points; ++g) {
    const double at = out.grid[g];
    out.density[g] =
        norm * (weights.array() * (-0.5 * ((at - points.array()) / h).square()).exp()).sum();
  }
  return out;
}

}  // namespace

double KdeGrid::integral() const {
  double area = 0.0;
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    area += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  return area;
}

double silverman_bandwidth(const Eigen::VectorXd& values) {
  const auto n = values.size();
  if (n < 1) throw DomainError("silverman_bandwidth: empty input");
  double sd = 0.0;
  if (n > 1) {
    const double mean = values.mean();
    sd = std::sqrt((values.array() - mean).square().sum() / static_cast<double>(n - 1));
  }
  std::vector<double> sorted(values.data(), values.data() + n);
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread = std::min(sd, iqr / 1.34);
  const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  if (!(h > 0.0))
    throw DomainError("silverman_bandwidth: rule yields zero; pass an explicit bandwidth");
  return h;
}

double kde_at(const Eigen::VectorXd& values, double bandwidth, double point) {
  if (values.size() < 1) throw DomainError("kde_at: empty input");
  if (!(bandwidth > 0.0)) throw DomainError("kde_at: bandwidth must be positive");
  const double norm = kInvSqrt2Pi / (static_cast<double>(values.size()) * bandwidth);
  return norm * (-0.5 * ((point - values.array()) / bandwidth).square()).exp().sum();
}

KdeGrid kde_density(const Eigen::VectorXd& values, const KdeConfig& cfg) {
  if (values.size() < 1) throw DomainError("kde: need at least one value");
  validate_grid(cfg);
  const double h = cfg.bandwidth ? *cfg.bandwidth : silverman_bandwidth(values);
  const double lo = cfg.range ? cfg.range->first : values.minCoeff() - 3.0 * h;
  const double hi = cfg.range ? cfg.range->second : values.maxCoeff() + 3.0 * h;
  return evaluate(values, Eigen::VectorXd::Ones(values.size()), h, lo, hi, cfg.grid_points);
}

KdeGrid kde_density_weighted(const Eigen::VectorXd& points, const Eigen::VectorXd& weights,
                             const KdeConfig& cfg) {
  if (points.size() < 1) throw DomainError("kde: need at least one point");
  if (points.size() != weights.size()) throw DomainError("kde: points and weights differ in length");
  if ((weights.array() < 0.0).any() || !(weights.sum() > 0.0))
    throw DomainError("kde: weights must be nonnegative with positive total");
  validate_grid(cfg);
  if (!cfg.bandwidth)
    throw DomainError("kde: weighted evaluation needs an explicit bandwidth");
  const double h = *cfg.bandwidth;
  const double lo = cfg.range ? cfg.range->first : points.minCoeff() - 3.0 * h;
  const double hi = cfg.range ? cfg.range->second : points.maxCoeff() + 3.0 * h;
  return evaluate(points, weights, h, lo, hi, cfg.grid_points);
}

}  // namespace derange
