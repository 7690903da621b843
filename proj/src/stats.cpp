#include "derange/stats.hpp"

#include <cmath>

namespace derange {

PairedSample::PairedSample(Eigen::VectorXd x, Eigen::VectorXd y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size())
    throw DomainError("PairedSample: x has " + std::to_string(x_.size()) + " rows but y has " +
                      std::to_string(y_.size()));
  if (x_.size() < 3)
    throw DomainError("PairedSample: need n >= 3 data rows, got " + std::to_string(x_.size()));
  if (!x_.allFinite()) throw DomainError("PairedSample: x contains a non-finite value");
  if (!y_.allFinite()) throw DomainError("PairedSample: y contains a non-finite value");
}

double t_statistic(double r, int n) {
  if (n <= 2) throw DomainError("t_statistic: needs n > 2");
  if (std::abs(r) > 1.0) throw DomainError("t_statistic: |r| > 1 is outside the domain");
  if (std::abs(r) == 1.0) throw DomainError("t_statistic: |r| = 1 makes the statistic unbounded");
  return r * std::sqrt(static_cast<double>(n - 2)) / std::sqrt(1.0 - r * r);
}

double t_cdf(double t, int df) {
  if (df < 1) throw DomainError("t_cdf: df must be >= 1");
  const double x = df / (df + t * t);
  const double tail = 0.5 * detail::regularized_incomplete_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

namespace detail {

namespace {

// Lentz's continued fraction for the incomplete beta (Numerical Recipes form).
double beta_cf(double a, double b, double x) {
  constexpr double kFpMin = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  // Wichura (1988), algorithm PPND16: rational approximations on three
  // regions, relative error below 1e-15.
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");

  static constexpr double a[8] = {3.3871328727963666080e0,  1.3314166789178437745e2,
                                  1.9715909503065514427e3,  1.3731693765509461125e4,
                                  4.5921953931549871457e4,  6.7265770927008700853e4,
                                  3.3430575583588128105e4,  2.5090809287301226727e3};
  static constexpr double b[8] = {1.0,
                                  4.2313330701600911252e1,
                                  6.8718700749205790830e2,
                                  5.3941960214247511077e3,
                                  2.1213794301586595867e4,
                                  3.9307895800092710610e4,
                                  2.8729085735721942674e4,
                                  5.2264952788528545610e3};
  static constexpr double c[8] = {1.42343711074968357734e0,  4.63033784615654529590e0,
                                  5.76949722146069140550e0,  3.64784832476320460504e0,
                                  1.27045825245236838258e0,  2.41780725177450611770e-1,
                                  2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[8] = {1.0,
                                  2.05319162663775882187e0,
                                  1.67638483018380384940e0,
                                  6.89767334985100004550e-1,
                                  1.48103976427480074590e-1,
                                  1.51986665636164571966e-2,
                                  5.47593808499534494600e-4,
                                  1.05075007164441684324e-9};
  static constexpr double e[8] = {6.65790464350110377720e0,  5.46378491116411436990e0,
                                  1.78482653991729133580e0,  2.96560571828504891230e-1,
                                  2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                  2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[8] = {1.0,
                                  5.99832206555887937690e-1,
                                  1.36929880922735805310e-1,
                                  1.48753612908506148525e-2,
                                  7.86869131145613259100e-4,
                                  1.84631831751005468180e-5,
                                  1.42151175831644588870e-7,
                                  2.04426310338993978564e-15};

  auto rational = [](const double (&num)[8], const double (&den)[8], double r) {
    double n = num[7];
    double m = den[7];
    for (int i = 6; i >= 0; --i) {
      n = n * r + num[i];
      m = m * r + den[i];
    }
    return n / m;
  };

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * rational(a, b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    value = rational(c, d, r - 1.6);
  } else {
    value = rational(e, f, r - 5.0);
  }
  return q < 0.0 ? -value : value;
}

}  // namespace detail

}  // namespace derange
