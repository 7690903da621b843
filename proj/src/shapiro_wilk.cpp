#include "derange/shapiro_wilk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "derange/derangements.hpp"
#include "derange/errors.hpp"
#include "derange/stats.hpp"

namespace derange {

namespace {

double poly(const double* c, int order, double x) {
  double value = c[0];
  double xn = 1.0;
  for (int i = 1; i < order; ++i) {
    xn *= x;
    value += c[i] * xn;
  }
  return value;
}

// Royston's approximation to the ideal weights: normal scores m_i at the
// Blom-like plotting positions, normalized, with polynomial corrections to
// the two extreme weights. The full vector is antisymmetric.
std::vector<double> weights(int n) {
  static constexpr double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
  static constexpr double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};

  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 3) {
    const double s = std::sqrt(0.5);
    w = {-s, 0.0, s};
    return w;
  }

  const int half = n / 2;
  std::vector<double> m(static_cast<std::size_t>(half));
  double ssq_half = 0.0;
  for (int i = 0; i < half; ++i) {
    m[static_cast<std::size_t>(i)] =
        detail::normal_quantile((i + 1 - 0.375) / (n + 0.25));
    ssq_half += m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)];
  }
  const double ssq = 2.0 * ssq_half;
  const double rsn = 1.0 / std::sqrt(static_cast<double>(n));

  const double a_last = -m[0] / std::sqrt(ssq) + poly(c1, 6, rsn);
  double a_second = 0.0;
  double phi;
  int fixed = 1;
  if (n > 5) {
    fixed = 2;
    a_second = -m[1] / std::sqrt(ssq) + poly(c2, 6, rsn);
    phi = std::sqrt((ssq - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                    (1.0 - 2.0 * a_last * a_last - 2.0 * a_second * a_second));
  } else {
    phi = std::sqrt((ssq - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a_last * a_last));
  }

  for (int i = 0; i < half; ++i) {
    const double lower = i < fixed ? -(i == 0 ? a_last : a_second)
                                   : m[static_cast<std::size_t>(i)] / phi;
    w[static_cast<std::size_t>(i)] = lower;
    w[static_cast<std::size_t>(n - 1 - i)] = -lower;
  }
  if (n % 2 == 1) w[static_cast<std::size_t>(half)] = 0.0;
  return w;
}

double p_value_for(double w_stat, int n) {
  static constexpr double g[2] = {-2.273, 0.459};
  static constexpr double c3[4] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[3] = {-0.4803, -0.082676, 0.0030302};

  if (n == 3) {
    const double pi6 = 6.0 / std::numbers::pi;
    const double stqr = std::asin(std::sqrt(0.75));
    const double p = pi6 * (std::asin(std::sqrt(w_stat)) - stqr);
    return std::clamp(p, 0.0, 1.0);
  }

  const double w1 = 1.0 - w_stat;
  if (w1 <= 0.0) return 1.0;
  double y = std::log(w1);
  double mu, sigma;
  if (n <= 11) {
    const double an = static_cast<double>(n);
    const double gamma = poly(g, 2, an);
    if (y >= gamma) return 1e-99;  // transformed value off the chart
    y = -std::log(gamma - y);
    mu = poly(c3, 4, an);
    sigma = std::exp(poly(c4, 4, an));
  } else {
    const double logn = std::log(static_cast<double>(n));
    mu = poly(c5, 4, logn);
    sigma = std::exp(poly(c6, 3, logn));
  }
  const double p = 1.0 - detail::normal_cdf((y - mu) / sigma);
  return std::clamp(p, 0.0, 1.0);
}

std::vector<double> subsample(const Eigen::VectorXd& values, int keep, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(values.size());
  std::vector<std::uint32_t> index(n);
  std::iota(index.begin(), index.end(), 0u);
  std::mt19937_64 rng = substream_rng(seed, 0);
  std::vector<double> out(static_cast<std::size_t>(keep));
  for (int i = 0; i < keep; ++i) {
    const auto j = i + detail::uniform_below(rng, n - static_cast<std::size_t>(i));
    std::swap(index[static_cast<std::size_t>(i)], index[j]);
    out[static_cast<std::size_t>(i)] = values[index[static_cast<std::size_t>(i)]];
  }
  return out;
}

}  // namespace

SwResult shapiro_wilk(const Eigen::VectorXd& values, std::uint64_t seed) {
  if (values.size() < 3) throw DomainError("shapiro_wilk: need at least 3 values");

  SwResult result;
  std::vector<double> x;
  if (values.size() > kShapiroWilkMaxN) {
    x = subsample(values, kShapiroWilkMaxN, seed);
    result.subsampled = true;
  } else {
    x.assign(values.data(), values.data() + values.size());
  }
  const int n = static_cast<int>(x.size());
  result.n_used = n;

  std::sort(x.begin(), x.end());
  if (!(x.back() > x.front()))
    throw DomainError("shapiro_wilk: values have zero spread");

  const std::vector<double> a = weights(n);

  // W is the squared correlation between the sorted data and the weights;
  // the weights sum to zero by antisymmetry.
  const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double sax = 0.0, ssa = 0.0, ssx = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xc = x[static_cast<std::size_t>(i)] - xbar;
    const double ac = a[static_cast<std::size_t>(i)];
    sax += ac * xc;
    ssa += ac * ac;
    ssx += xc * xc;
  }
  result.w = std::min(1.0, (sax * sax) / (ssa * ssx));
  result.p_value = p_value_for(result.w, n);
  return result;
}

}  // namespace derange
