#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "derange/summary.hpp"
#include "test_support.hpp"

using namespace derange;

namespace {

DistributionSummary make(SummaryConfig cfg = {}) { return DistributionSummary(cfg); }

std::vector<double> random_values(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& v : out) v = value(rng);
  return out;
}

}  // namespace

TEST_CASE("accumulate basics") {
  auto s = make();
  s.add(1.0);
  CHECK(s.count() == 1);
  CHECK(s.mean() == 1.0);
  CHECK(s.variance() == 0.0);

  s.add(2.0);
  s.add(3.0);
  CHECK(s.count() == 3);
  CHECK(s.mean() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.variance() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s.min() == 1.0);
  CHECK(s.max() == 3.0);

  CHECK_THROWS_AS(s.add(std::nan("")), DomainError);
  CHECK_THROWS_AS(make().mean(), DomainError);
}

TEST_CASE("moments agree with a two-pass recomputation over retained values") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    auto s = make();
    const auto values = random_values(rng, 200);
    for (double v : values) s.add(v);
    REQUIRE(s.retained_complete());
    const auto [mean, variance] = testsupport::two_pass_moments(s.retained());
    CHECK(s.mean() == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.variance() == doctest::Approx(variance).epsilon(1e-12));
  }
}

TEST_CASE("tail counters track the reference") {
  SummaryConfig cfg;
  cfg.observed_ref = 2.0;
  cfg.two_sided_center = 1.0;  // |ref - center| = 1
  auto s = make(cfg);
  for (double v : {0.5, 1.0, 2.0, 2.0, 3.5}) s.add(v);
  CHECK(s.ge_observed() == 3);      // 2, 2, 3.5
  CHECK(s.le_observed() == 4);      // 0.5, 1, 2, 2
  CHECK(s.abs_ge_observed() == 3);  // |v - 1| >= 1 holds for 2, 2, 3.5
  CHECK(s.ge_observed() + s.le_observed() >= s.count());
}

TEST_CASE("merge of two partial summaries equals the single-pass concatenation") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = random_values(rng, 120);
    const auto b = random_values(rng, 80);

    SummaryConfig cfg;
    cfg.observed_ref = 1.0;
    auto sa = make(cfg), sb = make(cfg), concat = make(cfg);
    for (double v : a) {
      sa.add(v);
      concat.add(v);
    }
    for (double v : b) {
      sb.add(v);
      concat.add(v);
    }
    sa.merge(sb);

    CHECK(sa.count() == concat.count());
    CHECK(sa.mean() == doctest::Approx(concat.mean()).epsilon(1e-12));
    CHECK(sa.variance() == doctest::Approx(concat.variance()).epsilon(1e-12));
    CHECK(sa.min() == concat.min());
    CHECK(sa.max() == concat.max());
    CHECK(sa.ge_observed() == concat.ge_observed());
    CHECK(sa.le_observed() == concat.le_observed());
    CHECK(sa.abs_ge_observed() == concat.abs_ge_observed());
    CHECK(sa.retained() == concat.retained());

    std::vector<double> all(a);
    all.insert(all.end(), b.begin(), b.end());
    const auto [mean, variance] = testsupport::two_pass_moments(all);
    CHECK(sa.mean() == doctest::Approx(mean).epsilon(1e-12));
    CHECK(sa.variance() == doctest::Approx(variance).epsilon(1e-12));
  }
}

TEST_CASE("merge is associative and order-insensitive within tolerance") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = random_values(rng, 40);
    const auto b = random_values(rng, 25);
    const auto c = random_values(rng, 60);

    auto fill = [&](const std::vector<double>& values) {
      auto s = make();
      for (double v : values) s.add(v);
      return s;
    };

    auto left = fill(a);
    left.merge(fill(b));
    left.merge(fill(c));

    auto bc = fill(b);
    bc.merge(fill(c));
    auto right = fill(a);
    right.merge(bc);

    CHECK(left.count() == right.count());
    CHECK(left.mean() == doctest::Approx(right.mean()).epsilon(1e-12));
    CHECK(left.variance() == doctest::Approx(right.variance()).epsilon(1e-12));
  }
}

TEST_CASE("merge rejects mismatched configs; empty merges are neutral") {
  SummaryConfig a, b;
  b.observed_ref = 3.0;
  auto sa = make(a);
  auto sb = make(b);
  CHECK_THROWS_AS(sa.merge(sb), DomainError);

  auto sc = make(a);
  sa.add(5.0);
  sa.merge(sc);  // empty right side
  CHECK(sa.count() == 1);
  sc.merge(sa);  // empty left side adopts the right
  CHECK(sc.count() == 1);
  CHECK(sc.mean() == 5.0);
}

TEST_CASE("retention stops at the cap; moments and counters are unaffected") {
  SummaryConfig cfg;
  cfg.retention_cap = 10;
  auto capped = make(cfg);
  auto uncapped = make();
  for (int i = 0; i < 50; ++i) {
    capped.add(i);
    uncapped.add(i);
  }
  CHECK_FALSE(capped.retained_complete());
  CHECK(capped.retained().empty());
  CHECK(uncapped.retained_complete());
  CHECK(capped.mean() == uncapped.mean());
  CHECK(capped.variance() == uncapped.variance());
  CHECK(capped.count() == uncapped.count());
}

TEST_CASE("histogram bins sum to count on both paths") {
  SummaryConfig preset;
  preset.histogram_bins = 8;
  preset.histogram_range = {{0.0, 1.0}};
  auto streamed = make(preset);

  auto retained = make();  // histogram derived from retained values

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(-0.2, 1.2);  // some outside the preset range
  for (int i = 0; i < 1000; ++i) {
    const double v = value(rng);
    streamed.add(v);
    retained.add(v);
  }

  auto total = [](const std::vector<std::uint64_t>& bins) {
    return std::accumulate(bins.begin(), bins.end(), std::uint64_t{0});
  };
  REQUIRE(streamed.has_histogram());
  REQUIRE(retained.has_histogram());
  CHECK(total(streamed.histogram()) == streamed.count());
  CHECK(total(retained.histogram()) == retained.count());

  // a capped summary without a preset range has no histogram to offer
  SummaryConfig capped_cfg;
  capped_cfg.retention_cap = 2;
  auto capped = make(capped_cfg);
  for (int i = 0; i < 5; ++i) capped.add(i);
  CHECK_FALSE(capped.has_histogram());
  CHECK(capped.histogram().empty());
}
