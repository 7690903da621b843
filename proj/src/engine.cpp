#include "derange/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>
#include <vector>

namespace derange {

const char* to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::OlsSlope:
      return "ols_slope";
    case StatisticKind::PearsonR:
      return "pearson_r";
    case StatisticKind::Covariance:
      return "covariance";
  }
  return "unknown";
}

const char* to_string(TestMode mode) {
  return mode == TestMode::Exact ? "exact" : "monte_carlo";
}

StatisticKind statistic_from_name(const std::string& name) {
  if (name == "slope") return StatisticKind::OlsSlope;
  if (name == "pearson") return StatisticKind::PearsonR;
  if (name == "cov") return StatisticKind::Covariance;
  throw DomainError("unknown statistic '" + name + "' (expected slope, pearson, or cov)");
}

double evaluate_statistic(const PairedSample& s, StatisticKind kind) {
  switch (kind) {
    case StatisticKind::OlsSlope:
      return ols_slope(s);
    case StatisticKind::PearsonR:
      return pearson_r(s);
    case StatisticKind::Covariance:
      return covariance(s);
  }
  throw DomainError("evaluate_statistic: unknown statistic");
}

double expected_family_mean(const PairedSample& s, StatisticKind kind) {
  return -evaluate_statistic(s, kind) / static_cast<double>(s.size() - 1);
}

double percentile_of(const DistributionSummary& summary, double observed) {
  if (summary.count() == 0) throw DomainError("percentile_of: empty summary");
  std::uint64_t ge, le;
  if (observed == summary.config().observed_ref) {
    ge = summary.ge_observed();
    le = summary.le_observed();
  } else if (summary.retained_complete()) {
    ge = le = 0;
    for (double v : summary.retained()) {
      if (v >= observed) ++ge;
      if (v <= observed) ++le;
    }
  } else {
    throw DomainError(
        "percentile_of: reference differs from the accumulated one and values were not retained");
  }
  // #below + 0.5 * #ties, expressed through the two tail counters.
  return 50.0 * static_cast<double>(summary.count() - ge + le) /
         static_cast<double>(summary.count());
}

namespace {

// Monte Carlo draws split into fixed logical blocks; each block's generator
// substream depends only on (seed, block index), so the split — and the
// result — is a pure function of the config, never of the worker count.
std::uint64_t mc_block_size(std::uint64_t samples) {
  constexpr std::uint64_t kBase = 16384;
  constexpr std::uint64_t kMaxBlocks = 4096;
  return std::max(kBase, (samples + kMaxBlocks - 1) / kMaxBlocks);
}

std::string mapping_str(const Eigen::VectorXi& mapping) {
  std::ostringstream out;
  for (Eigen::Index j = 0; j < mapping.size(); ++j) {
    if (j) out << ',';
    out << mapping[j];
  }
  return out.str();
}

// Evaluates the statistic on (x composed with a mapping, y). Degeneracy of a
// permuted column cannot occur when the original column has spread, but a
// kernel failure is still reported with the offending member attached.
class MemberEvaluator {
 public:
  MemberEvaluator(const PairedSample& s, StatisticKind kind)
      : x_(s.x()), y_(s.y()), kind_(kind), permuted_(s.size()) {}

  double operator()(const Eigen::VectorXi& mapping) {
    for (Eigen::Index j = 0; j < permuted_.size(); ++j) permuted_[j] = x_[mapping[j] - 1];
    try {
      switch (kind_) {
        case StatisticKind::OlsSlope:
          return ols_slope(permuted_, y_);
        case StatisticKind::PearsonR:
          return pearson_r(permuted_, y_);
        case StatisticKind::Covariance:
          return covariance(permuted_, y_);
      }
    } catch (const DomainError& e) {
      throw DomainError("family member (" + mapping_str(mapping) + "): " + e.what());
    }
    throw DomainError("evaluate_statistic: unknown statistic");
  }

 private:
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& y_;
  StatisticKind kind_;
  Eigen::VectorXd permuted_;
};

// Bounds of the statistic over every permutation of x. The permuted statistic
// is an increasing affine map of T = sum x_perm(j) * y_j, and T is extremal at
// the sorted and anti-sorted pairings, so these bounds cover every family
// member; they preset the streaming histogram range.
std::pair<double, double> statistic_bounds(const PairedSample& s, StatisticKind kind) {
  const auto n = s.size();
  Eigen::VectorXd xs = s.x();
  Eigen::VectorXd ys = s.y();
  std::sort(xs.data(), xs.data() + n);
  std::sort(ys.data(), ys.data() + n);
  const double t_max = xs.dot(ys);
  const double t_min = xs.dot(ys.reverse());

  const double xm = s.x().mean();
  const double ym = s.y().mean();
  const double nd = static_cast<double>(n);
  auto stat_of = [&](double t) {
    switch (kind) {
      case StatisticKind::OlsSlope:
        return (t - nd * xm * ym) / (s.x().array() - xm).square().sum();
      case StatisticKind::PearsonR:
        return (t / nd - xm * ym) /
               std::sqrt(population_variance(s.x()) * population_variance(s.y()));
      case StatisticKind::Covariance:
        return t / nd - xm * ym;
    }
    return 0.0;
  };
  double lo = stat_of(t_min);
  double hi = stat_of(t_max);
  if (!(hi > lo)) {  // constant family (e.g. constant y); keep the bins usable
    lo -= 0.5;
    hi += 0.5;
  }
  return {lo, hi};
}

// Runs `task(t)` for t in [0, task_count) over a claiming pool. Each task
// writes only its own slot, so results cannot depend on the worker count.
void run_tasks(int threads, std::size_t task_count, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(task_count);
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t t; (t = cursor.fetch_add(1)) < task_count;) {
      try {
        task(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (threads <= 1 || task_count <= 1) {
    worker();
  } else {
    const auto pool_size = std::min<std::size_t>(static_cast<std::size_t>(threads), task_count);
    std::vector<std::jthread> pool;
    pool.reserve(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) pool.emplace_back(worker);
    pool.clear();  // joins
  }
  for (const auto& error : errors)
    if (error) std::rethrow_exception(error);
}

void validate(const TestConfig& cfg) {
  if (cfg.mode == TestMode::MonteCarlo && cfg.mc_samples < 1)
    throw DomainError("derangement_test: Monte Carlo mode needs at least one sample");
  if (cfg.histogram_bins < 1) throw DomainError("derangement_test: need at least one bin");
  if (cfg.max_exact_n < 2) throw DomainError("derangement_test: max_exact_n must be >= 2");
  if (cfg.threads < 1) throw DomainError("derangement_test: thread count must be >= 1");
}

}  // namespace

TestResult derangement_test(const PairedSample& s, const TestConfig& cfg) {
  validate(cfg);
  const int n = static_cast<int>(s.size());
  const double observed = evaluate_statistic(s, cfg.statistic);
  const double center =
      cfg.center == TwoSidedCenter::FamilyMean ? expected_family_mean(s, cfg.statistic) : 0.0;

  SummaryConfig scfg;
  scfg.retention_cap = cfg.retention_cap;
  scfg.histogram_bins = cfg.histogram_bins;
  scfg.histogram_range = statistic_bounds(s, cfg.statistic);
  scfg.observed_ref = observed;
  scfg.two_sided_center = center;

  std::uint64_t family_size = 0;
  if (cfg.mode == TestMode::Exact) {
    if (n > cfg.max_exact_n || n > kHardExactLimit) {
      const std::string size = n <= kMaxCountArgument ? count_derangements(n).str() : "over 10^38";
      throw SizeRefusalError("exact mode at n = " + std::to_string(n) + " would enumerate " +
                             size + " family members; use Monte Carlo mode (--mode mc)" +
                             (n <= kHardExactLimit ? " or raise the exact cap" : ""));
    }
    family_size = static_cast<std::uint64_t>(count_derangements(n).value);
  } else {
    family_size = cfg.mc_samples;
  }
  // Skip per-value retention when the family cannot fit anyway; keeps the
  // per-task memory bounded instead of discovering the overflow at merge time.
  if (family_size > cfg.retention_cap) scfg.retention_cap = 0;

  const std::uint64_t block = cfg.mode == TestMode::Exact ? 0 : mc_block_size(cfg.mc_samples);
  const std::size_t task_count =
      cfg.mode == TestMode::Exact
          ? static_cast<std::size_t>(n - 1)
          : static_cast<std::size_t>((cfg.mc_samples + block - 1) / block);
  std::vector<DistributionSummary> parts(task_count, DistributionSummary(scfg));

  if (cfg.mode == TestMode::Exact) {
    // Partition by the first mapping value: n-1 independent lexicographic
    // blocks, merged below in a fixed order.
    run_tasks(cfg.threads, task_count, [&](std::size_t t) {
      MemberEvaluator evaluate(s, cfg.statistic);
      enumerate_derangements_with_first(n, static_cast<int>(t) + 2,
                                        [&](const Eigen::VectorXi& mapping) {
                                          parts[t].add(evaluate(mapping));
                                        });
    });
  } else {
    run_tasks(cfg.threads, task_count, [&](std::size_t t) {
      MemberEvaluator evaluate(s, cfg.statistic);
      std::mt19937_64 rng = substream_rng(cfg.seed, t);
      const std::uint64_t begin = t * block;
      const std::uint64_t draws = std::min(block, cfg.mc_samples - begin);
      for (std::uint64_t k = 0; k < draws; ++k)
        parts[t].add(evaluate(sample_derangement(n, rng)));
    });
  }

  TestResult result;
  result.family = DistributionSummary(scfg);
  for (const auto& part : parts) result.family.merge(part);

  if (cfg.mode == TestMode::Exact && result.family.count() != family_size)
    throw std::logic_error("derangement_test: enumeration and recurrence disagree on N(n)");

  result.observed = observed;
  result.family_size = family_size;
  result.mode = cfg.mode;
  result.seed = cfg.seed;
  result.statistic = cfg.statistic;
  result.two_sided_center = center;

  const auto count = static_cast<double>(result.family.count());
  if (cfg.mode == TestMode::Exact) {
    // The family is the complete population; p-values are exact proportions.
    result.p_upper = static_cast<double>(result.family.ge_observed()) / count;
    result.p_lower = static_cast<double>(result.family.le_observed()) / count;
    result.p_two_sided = static_cast<double>(result.family.abs_ge_observed()) / count;
  } else {
    result.p_upper = static_cast<double>(result.family.ge_observed() + 1) / (count + 1.0);
    result.p_lower = static_cast<double>(result.family.le_observed() + 1) / (count + 1.0);
    result.p_two_sided = static_cast<double>(result.family.abs_ge_observed() + 1) / (count + 1.0);
  }
  result.percentile_of_observed = percentile_of(result.family, observed);
  return result;
}

}  // namespace derange
