#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "derange/engine.hpp"
#include "test_support.hpp"

using namespace derange;

namespace {

PairedSample identity_sample(int n) {
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, n);
  return PairedSample(v, v);
}

PairedSample random_sample(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> value(-10.0, 10.0);
  Eigen::VectorXd x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = value(rng);
    y[i] = value(rng);
  }
  return PairedSample(x, y);
}

// Oracle: evaluate the statistic over the brute-force family directly.
std::vector<double> brute_force_family(const PairedSample& s, StatisticKind kind) {
  std::vector<double> values;
  const int n = static_cast<int>(s.size());
  for (const auto& mapping : testsupport::brute_force_derangements(n)) {
    Eigen::VectorXd xp(n);
    for (int j = 0; j < n; ++j) xp[j] = s.x()[mapping[static_cast<std::size_t>(j)] - 1];
    PairedSample permuted(xp, s.y());
    values.push_back(evaluate_statistic(permuted, kind));
  }
  return values;
}

bool same_result(const TestResult& a, const TestResult& b) {
  return a.observed == b.observed && a.family_size == b.family_size &&
         a.family.count() == b.family.count() && a.family.mean() == b.family.mean() &&
         a.family.variance() == b.family.variance() && a.family.min() == b.family.min() &&
         a.family.max() == b.family.max() &&
         a.family.ge_observed() == b.family.ge_observed() &&
         a.family.le_observed() == b.family.le_observed() &&
         a.family.abs_ge_observed() == b.family.abs_ge_observed() &&
         a.p_upper == b.p_upper && a.p_lower == b.p_lower &&
         a.p_two_sided == b.p_two_sided &&
         a.percentile_of_observed == b.percentile_of_observed &&
         a.family.histogram() == b.family.histogram() &&
         a.family.retained() == b.family.retained();
}

}  // namespace

TEST_CASE("n = 3 identity data: the whole family is {-0.5, -0.5}") {
  TestConfig cfg;
  const auto result = derangement_test(identity_sample(3), cfg);

  CHECK(result.observed == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(result.family_size == 2);
  CHECK(result.family.count() == 2);
  CHECK(result.family.mean() == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(result.family.stddev() == doctest::Approx(0.0));
  CHECK(result.p_upper == 0.0);
  CHECK(result.p_lower == 1.0);
  CHECK(result.percentile_of_observed == 100.0);

  const auto retained = result.family.retained();
  REQUIRE(retained.size() == 2);
  CHECK(retained[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(retained[1] == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("expected_family_mean") {
  CHECK(expected_family_mean(identity_sample(10), StatisticKind::OlsSlope) ==
        doctest::Approx(-1.0 / 9.0).epsilon(1e-15));
  CHECK(expected_family_mean(identity_sample(3), StatisticKind::OlsSlope) ==
        doctest::Approx(-0.5).epsilon(1e-15));

  // slope zero -> proportionality gives zero
  Eigen::VectorXd x(4), y(4);
  x << 1, 2, 3, 4;
  y << 1, -1, -1, 1;
  CHECK(expected_family_mean(PairedSample(x, y), StatisticKind::OlsSlope) == 0.0);
}

TEST_CASE("exact family mean equals the analytic oracle for every statistic") {
  std::mt19937_64 rng(4242);
  for (int n = 3; n <= 7; ++n) {
    for (StatisticKind kind :
         {StatisticKind::OlsSlope, StatisticKind::PearsonR, StatisticKind::Covariance}) {
      const auto sample = random_sample(rng, n);
      TestConfig cfg;
      cfg.statistic = kind;
      const auto result = derangement_test(sample, cfg);
      const double analytic = expected_family_mean(sample, kind);
      CAPTURE(n);
      CAPTURE(to_string(kind));
      CHECK(std::abs(result.family.mean() - analytic) < 1e-10);
    }
  }
}

TEST_CASE("exact mode matches the brute-force family") {
  std::mt19937_64 rng(99);
  const auto sample = random_sample(rng, 6);
  for (StatisticKind kind :
       {StatisticKind::OlsSlope, StatisticKind::PearsonR, StatisticKind::Covariance}) {
    TestConfig cfg;
    cfg.statistic = kind;
    const auto result = derangement_test(sample, cfg);
    auto expected = brute_force_family(sample, kind);

    REQUIRE(result.family.retained_complete());
    auto actual = result.family.retained();
    CHECK(actual.size() == expected.size());
    std::sort(actual.begin(), actual.end());
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < actual.size(); ++i)
      CHECK(actual[i] == doctest::Approx(expected[i]).epsilon(1e-12));

    // p-values recomputed from the oracle values
    const double observed = evaluate_statistic(sample, kind);
    const auto ge = static_cast<double>(
        std::count_if(expected.begin(), expected.end(), [&](double v) { return v >= observed; }));
    CHECK(result.p_upper == doctest::Approx(ge / static_cast<double>(expected.size())));
  }
}

TEST_CASE("p_two_sided equals the tail proportion recomputed from retained values") {
  std::mt19937_64 rng(2718);
  for (int rep = 0; rep < 5; ++rep) {
    const auto sample = random_sample(rng, 6);
    TestConfig cfg;
    cfg.center = rep % 2 == 0 ? TwoSidedCenter::FamilyMean : TwoSidedCenter::Zero;
    const auto result = derangement_test(sample, cfg);

    const double center = result.two_sided_center;
    const double dev = std::abs(result.observed - center);
    std::uint64_t tail = 0;
    for (double v : result.family.retained())
      if (std::abs(v - center) >= dev) ++tail;
    CHECK(result.p_two_sided ==
          static_cast<double>(tail) / static_cast<double>(result.family.count()));
    CHECK(result.p_two_sided >= 0.0);
    CHECK(result.p_two_sided <= 1.0);
    if (cfg.center == TwoSidedCenter::Zero) CHECK(result.two_sided_center == 0.0);
  }
}

TEST_CASE("exact mode is invariant to joint row permutations") {
  std::mt19937_64 rng(321);
  const auto sample = random_sample(rng, 6);
  TestConfig cfg;
  const auto base = derangement_test(sample, cfg);

  std::vector<int> order(6);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Eigen::VectorXd xp(6), yp(6);
  for (int i = 0; i < 6; ++i) {
    xp[i] = sample.x()[order[static_cast<std::size_t>(i)]];
    yp[i] = sample.y()[order[static_cast<std::size_t>(i)]];
  }
  const auto permuted = derangement_test(PairedSample(xp, yp), cfg);

  auto a = base.family.retained();
  auto b = permuted.family.retained();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("results are identical for any worker count") {
  std::mt19937_64 rng(555);
  const auto sample = random_sample(rng, 6);

  SUBCASE("exact") {
    TestConfig one, four;
    one.threads = 1;
    four.threads = 4;
    CHECK(same_result(derangement_test(sample, one), derangement_test(sample, four)));
  }
  SUBCASE("monte carlo") {
    TestConfig one, three;
    one.mode = three.mode = TestMode::MonteCarlo;
    one.mc_samples = three.mc_samples = 50000;  // spans several blocks
    one.seed = three.seed = 31337;
    one.threads = 1;
    three.threads = 3;
    const auto a = derangement_test(sample, one);
    const auto b = derangement_test(sample, three);
    CHECK(same_result(a, b));

    TestConfig other = one;
    other.seed = 31338;
    CHECK_FALSE(derangement_test(sample, other).family.mean() == a.family.mean());
  }
}

TEST_CASE("monte carlo p-values carry the +1 correction") {
  TestConfig cfg;
  cfg.mode = TestMode::MonteCarlo;
  cfg.mc_samples = 1000;
  cfg.seed = 7;
  const auto result = derangement_test(identity_sample(10), cfg);

  CHECK(result.family_size == 1000);
  CHECK(result.family.count() == 1000);
  const double m = 1000.0;
  CHECK(result.p_upper ==
        (static_cast<double>(result.family.ge_observed()) + 1.0) / (m + 1.0));
  CHECK(result.p_lower ==
        (static_cast<double>(result.family.le_observed()) + 1.0) / (m + 1.0));
  // observed = 1 beats the whole family for identity data
  CHECK(result.p_upper == doctest::Approx(1.0 / 1001.0));
  CHECK(result.mode == TestMode::MonteCarlo);
}

TEST_CASE("exact-mode size refusal suggests Monte Carlo") {
  TestConfig cfg;
  cfg.max_exact_n = 5;
  CHECK_THROWS_WITH_AS(derangement_test(identity_sample(6), cfg),
                       doctest::Contains("Monte Carlo"), SizeRefusalError);
  cfg.max_exact_n = 6;
  CHECK_NOTHROW(derangement_test(identity_sample(6), cfg));
}

TEST_CASE("streaming mode (cap exceeded) preserves moments, counters, histogram") {
  std::mt19937_64 rng(777);
  const auto sample = random_sample(rng, 6);

  TestConfig retained_cfg;
  TestConfig streaming_cfg;
  streaming_cfg.retention_cap = 16;  // far below N(6) = 265

  const auto full = derangement_test(sample, retained_cfg);
  const auto streamed = derangement_test(sample, streaming_cfg);

  CHECK_FALSE(streamed.family.retained_complete());
  CHECK(streamed.family.count() == 265);
  CHECK(streamed.family.mean() == full.family.mean());
  CHECK(streamed.family.variance() == full.family.variance());
  CHECK(streamed.p_upper == full.p_upper);
  CHECK(streamed.p_lower == full.p_lower);
  CHECK(streamed.p_two_sided == full.p_two_sided);
  CHECK(streamed.percentile_of_observed == full.percentile_of_observed);
  CHECK(streamed.family.histogram() == full.family.histogram());  // preset range on both
}

TEST_CASE("degenerate inputs are rejected up front") {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(5, 2.0);
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
  TestConfig cfg;
  CHECK_THROWS_AS(derangement_test(PairedSample(x, y), cfg), DomainError);

  cfg.statistic = StatisticKind::PearsonR;
  CHECK_THROWS_AS(derangement_test(PairedSample(y, x), cfg), DomainError);

  // covariance tolerates a constant column: the family is all zeros
  cfg.statistic = StatisticKind::Covariance;
  const auto result = derangement_test(PairedSample(y, x), cfg);
  CHECK(result.family.mean() == 0.0);
  CHECK(result.family.variance() == 0.0);
}

TEST_CASE("config validation") {
  TestConfig cfg;
  cfg.mode = TestMode::MonteCarlo;
  cfg.mc_samples = 0;
  CHECK_THROWS_AS(derangement_test(identity_sample(4), cfg), DomainError);

  cfg = {};
  cfg.threads = 0;
  CHECK_THROWS_AS(derangement_test(identity_sample(4), cfg), DomainError);

  cfg = {};
  cfg.histogram_bins = 0;
  CHECK_THROWS_AS(derangement_test(identity_sample(4), cfg), DomainError);

  CHECK_THROWS_AS(statistic_from_name("median"), DomainError);
  CHECK(statistic_from_name("slope") == StatisticKind::OlsSlope);
  CHECK(statistic_from_name("pearson") == StatisticKind::PearsonR);
  CHECK(statistic_from_name("cov") == StatisticKind::Covariance);
}

TEST_CASE("percentile_of conventions") {
  SummaryConfig cfg;
  cfg.observed_ref = 1.0;
  DistributionSummary family(cfg);
  family.add(-0.5);
  family.add(-0.5);
  CHECK(percentile_of(family, 1.0) == 100.0);

  // observed below every value
  SummaryConfig below;
  below.observed_ref = -2.0;
  DistributionSummary fam2(below);
  for (double v : {0.0, 1.0, 2.0}) fam2.add(v);
  CHECK(percentile_of(fam2, -2.0) == 0.0);

  // observed ties every value: mid-rank puts it at 50
  SummaryConfig ties;
  ties.observed_ref = 3.0;
  DistributionSummary fam3(ties);
  for (int i = 0; i < 4; ++i) fam3.add(3.0);
  CHECK(percentile_of(fam3, 3.0) == 50.0);

  // arbitrary reference against retained values
  CHECK(percentile_of(fam2, 0.5) == doctest::Approx(100.0 / 3.0));
  CHECK_THROWS_AS(percentile_of(DistributionSummary(), 0.0), DomainError);
}
