#include "derange/summary.hpp"

#include <algorithm>
#include <cmath>

namespace derange {

DistributionSummary::DistributionSummary(SummaryConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.histogram_bins < 1) throw DomainError("DistributionSummary: need at least one bin");
  if (cfg_.histogram_range) {
    const auto [lo, hi] = *cfg_.histogram_range;
    if (!(lo <= hi)) throw DomainError("DistributionSummary: histogram range is inverted");
  }
  abs_observed_dev_ = std::abs(cfg_.observed_ref - cfg_.two_sided_center);
}

namespace {

std::size_t bin_index(double value, double lo, double hi, std::size_t nbins) {
  if (!(hi > lo)) return 0;
  const double t = (value - lo) / (hi - lo);
  const auto idx = static_cast<std::int64_t>(t * static_cast<double>(nbins));
  return static_cast<std::size_t>(std::clamp<std::int64_t>(idx, 0, static_cast<std::int64_t>(nbins) - 1));
}

}  // namespace

void DistributionSummary::add(double value) {
  if (!std::isfinite(value)) throw DomainError("DistributionSummary: non-finite value");
  if (count_ == 0) {
    min_ = max_ = value;
  } else {
    min_ = std::min(min_, value);
    max_ = std::max(max_, value);
  }
  ++count_;
  const double delta = value - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (value - mean_);

  if (value >= cfg_.observed_ref) ++ge_;
  if (value <= cfg_.observed_ref) ++le_;
  if (std::abs(value - cfg_.two_sided_center) >= abs_observed_dev_) ++abs_ge_;

  if (cfg_.histogram_range) {
    // allocated on first use; empty summaries stay cheap in wide reductions
    if (bins_.empty()) bins_.assign(static_cast<std::size_t>(cfg_.histogram_bins), 0);
    const auto [lo, hi] = *cfg_.histogram_range;
    ++bins_[bin_index(value, lo, hi, bins_.size())];
  }

  if (retained_complete_) {
    if (retained_.size() < cfg_.retention_cap) {
      retained_.push_back(value);
    } else {
      retained_complete_ = false;
      retained_.clear();
      retained_.shrink_to_fit();
    }
  }
}

void DistributionSummary::merge(const DistributionSummary& other) {
  if (cfg_.observed_ref != other.cfg_.observed_ref ||
      cfg_.two_sided_center != other.cfg_.two_sided_center ||
      cfg_.histogram_bins != other.cfg_.histogram_bins ||
      cfg_.histogram_range != other.cfg_.histogram_range ||
      cfg_.retention_cap != other.cfg_.retention_cap)
    throw DomainError("DistributionSummary: cannot merge summaries with different configs");
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }

  const double delta = other.mean_ - mean_;
  const auto na = static_cast<double>(count_);
  const auto nb = static_cast<double>(other.count_);
  const double nc = na + nb;
  mean_ += delta * (nb / nc);
  m2_ += other.m2_ + delta * delta * (na * nb / nc);
  count_ += other.count_;
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
  ge_ += other.ge_;
  le_ += other.le_;
  abs_ge_ += other.abs_ge_;
  for (std::size_t i = 0; i < bins_.size(); ++i) bins_[i] += other.bins_[i];

  if (retained_complete_ && other.retained_complete_ &&
      retained_.size() + other.retained_.size() <= cfg_.retention_cap) {
    retained_.insert(retained_.end(), other.retained_.begin(), other.retained_.end());
  } else {
    retained_complete_ = false;
    retained_.clear();
    retained_.shrink_to_fit();
  }
}

void DistributionSummary::require_nonempty(const char* op) const {
  if (count_ == 0) throw DomainError(std::string(op) + ": empty summary");
}

double DistributionSummary::mean() const {
  require_nonempty("mean");
  return mean_;
}

double DistributionSummary::variance() const {
  require_nonempty("variance");
  return m2_ / static_cast<double>(count_);
}

double DistributionSummary::stddev() const { return std::sqrt(variance()); }

double DistributionSummary::min() const {
  require_nonempty("min");
  return min_;
}

double DistributionSummary::max() const {
  require_nonempty("max");
  return max_;
}

bool DistributionSummary::has_histogram() const {
  return !bins_.empty() || (retained_complete_ && count_ > 0);
}

std::vector<std::uint64_t> DistributionSummary::histogram() const {
  if (!bins_.empty()) return bins_;
  if (!retained_complete_ || count_ == 0) return {};
  std::vector<std::uint64_t> out(static_cast<std::size_t>(cfg_.histogram_bins), 0);
  for (double v : retained_) ++out[bin_index(v, min_, max_, out.size())];
  return out;
}

std::pair<double, double> DistributionSummary::histogram_bounds() const {
  if (cfg_.histogram_range) return *cfg_.histogram_range;
  require_nonempty("histogram_bounds");
  return {min_, max_};
}

}  // namespace derange
