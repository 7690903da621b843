#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "derange/errors.hpp"

namespace derange {

/// Paired observations: x explanatory, y response. Validated on construction:
/// equal lengths, n >= 3, all entries finite.
class PairedSample {
 public:
  PairedSample(Eigen::VectorXd x, Eigen::VectorXd y);

  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  Eigen::Index size() const { return x_.size(); }

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
};

namespace detail {

inline void require_same_nonempty(Eigen::Index nx, Eigen::Index ny, const char* op) {
  if (nx != ny) throw DomainError(std::string(op) + ": x and y differ in length");
  if (nx == 0) throw DomainError(std::string(op) + ": empty input");
}

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile (Wichura's PPND16), p in (0, 1).
double normal_quantile(double p);

}  // namespace detail

/// Population covariance (1/n) * sum (x_i - mean(x)) (y_i - mean(y)).
/// The 1/n convention is deliberate: the enumerated family downstream is a
/// complete population, not a sample.
template <typename DerivedX, typename DerivedY>
double covariance(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  detail::require_same_nonempty(x.size(), y.size(), "covariance");
  const auto xd = x.template cast<double>();
  const auto yd = y.template cast<double>();
  const double xm = xd.mean();
  const double ym = yd.mean();
  return ((xd.array() - xm) * (yd.array() - ym)).sum() / static_cast<double>(x.size());
}

/// Population variance, same convention as covariance.
template <typename Derived>
double population_variance(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) throw DomainError("population_variance: empty input");
  const auto xd = x.template cast<double>();
  const double xm = xd.mean();
  return (xd.array() - xm).square().sum() / static_cast<double>(x.size());
}

/// Pearson correlation coefficient, in [-1, 1]. Requires spread on both sides.
template <typename DerivedX, typename DerivedY>
double pearson_r(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  detail::require_same_nonempty(x.size(), y.size(), "pearson_r");
  const double vx = population_variance(x);
  const double vy = population_variance(y);
  if (!(vx > 0.0)) throw DomainError("pearson_r: x has zero variance");
  if (!(vy > 0.0)) throw DomainError("pearson_r: y has zero variance");
  const double r = covariance(x, y) / std::sqrt(vx * vy);
  return std::clamp(r, -1.0, 1.0);
}

/// Least-squares slope of y on x: sum y_i (x_i - mean(x)) / sum (x_i - mean(x))^2.
template <typename DerivedX, typename DerivedY>
double ols_slope(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  detail::require_same_nonempty(x.size(), y.size(), "ols_slope");
  const auto xd = x.template cast<double>();
  const auto yd = y.template cast<double>();
  const double xm = xd.mean();
  const double ssx = (xd.array() - xm).square().sum();
  if (!(ssx > 0.0)) throw DomainError("ols_slope: x has zero variance");
  return (yd.array() * (xd.array() - xm)).sum() / ssx;
}

inline double covariance(const PairedSample& s) { return covariance(s.x(), s.y()); }
inline double pearson_r(const PairedSample& s) { return pearson_r(s.x(), s.y()); }
inline double ols_slope(const PairedSample& s) { return ols_slope(s.x(), s.y()); }

/// t = r sqrt(n-2) / sqrt(1 - r^2); monotone in r on (-1, 1).
double t_statistic(double r, int n);

/// P(T <= t) for Student's t with df degrees of freedom.
double t_cdf(double t, int df);

}  // namespace derange
