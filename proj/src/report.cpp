#include "derange/report.hpp"

#include <cmath>
#include <sstream>

#include "derange/csv.hpp"
#include "derange/version.hpp"

namespace derange {

namespace {

Eigen::VectorXd histogram_midpoints(const DistributionSummary& family) {
  const auto [lo, hi] = family.histogram_bounds();
  const auto bins = family.histogram();
  const double width = (hi - lo) / static_cast<double>(bins.size());
  Eigen::VectorXd mids(static_cast<Eigen::Index>(bins.size()));
  for (std::size_t b = 0; b < bins.size(); ++b)
    mids[static_cast<Eigen::Index>(b)] = lo + (static_cast<double>(b) + 0.5) * width;
  return mids;
}

// Quartile positions interpolated from cumulative bin counts.
double histogram_quantile(const DistributionSummary& family, double q) {
  const auto [lo, hi] = family.histogram_bounds();
  const auto bins = family.histogram();
  const double width = (hi - lo) / static_cast<double>(bins.size());
  const double target = q * static_cast<double>(family.count());
  double cumulative = 0.0;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const double next = cumulative + static_cast<double>(bins[b]);
    if (next >= target && bins[b] > 0) {
      const double frac = (target - cumulative) / static_cast<double>(bins[b]);
      return lo + (static_cast<double>(b) + frac) * width;
    }
    cumulative = next;
  }
  return hi;
}

}  // namespace

KdeGrid family_kde(const TestResult& result, KdeConfig cfg) {
  const auto& family = result.family;
  if (family.retained_complete()) {
    const Eigen::Map<const Eigen::VectorXd> values(family.retained().data(),
                                                   static_cast<Eigen::Index>(family.retained().size()));
    return kde_density(values, cfg);
  }
  if (!family.has_histogram())
    throw DomainError("family_kde: family has neither retained values nor a histogram");
  const Eigen::VectorXd mids = histogram_midpoints(family);
  const auto bins = family.histogram();
  Eigen::VectorXd weights(mids.size());
  for (std::size_t b = 0; b < bins.size(); ++b)
    weights[static_cast<Eigen::Index>(b)] = static_cast<double>(bins[b]);
  if (!cfg.bandwidth) {
    // Silverman's rule from the streamed moments; IQR is interpolated from
    // the histogram, so the bandwidth is approximate on this path.
    const double sd = family.count() > 1
                          ? family.stddev() * std::sqrt(static_cast<double>(family.count()) /
                                                        static_cast<double>(family.count() - 1))
                          : 0.0;
    const double iqr = histogram_quantile(result.family, 0.75) - histogram_quantile(result.family, 0.25);
    const double h = 0.9 * std::min(sd, iqr / 1.34) *
                     std::pow(static_cast<double>(family.count()), -0.2);
    if (!(h > 0.0))
      throw DomainError("family_kde: bandwidth rule yields zero; pass an explicit bandwidth");
    cfg.bandwidth = h;
  }
  return kde_density_weighted(mids, weights, cfg);
}

SwResult family_shapiro(const TestResult& result, std::uint64_t seed) {
  const auto& family = result.family;
  if (!family.retained_complete())
    throw DomainError(
        "family_shapiro: family values were not retained; raise the retention cap to run the "
        "normality diagnostic");
  const Eigen::Map<const Eigen::VectorXd> values(family.retained().data(),
                                                 static_cast<Eigen::Index>(family.retained().size()));
  return shapiro_wilk(values, seed);
}

nlohmann::json build_report(const TestResult& result, const ReportOptions& options) {
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  doc["input"] = {{"path", options.input_path},
                  {"rows", options.input_rows},
                  {"had_header", options.had_header}};
  doc["statistic"] = to_string(result.statistic);
  doc["mode"] = to_string(result.mode);
  doc["seed"] = result.seed;
  doc["observed"] = result.observed;

  const auto& family = result.family;
  doc["family"] = {{"size", result.family_size},
                   {"mean", family.mean()},
                   {"variance", family.variance()},
                   {"stddev", family.stddev()},
                   {"min", family.min()},
                   {"max", family.max()},
                   {"retained", family.retained_complete()},
                   {"tail_counts",
                    {{"ge_observed", family.ge_observed()},
                     {"le_observed", family.le_observed()},
                     {"abs_ge_observed", family.abs_ge_observed()}}}};

  doc["p_upper"] = result.p_upper;
  doc["p_lower"] = result.p_lower;
  doc["p_two_sided"] = result.p_two_sided;
  doc["two_sided_center"] = result.two_sided_center;
  doc["percentile_of_observed"] = result.percentile_of_observed;

  if (options.include_histogram && family.has_histogram()) {
    const auto [lo, hi] = family.histogram_bounds();
    doc["histogram"] = {{"lo", lo}, {"hi", hi}, {"counts", family.histogram()}};
  }
  if (options.kde) {
    const auto& kde = *options.kde;
    doc["kde"] = {{"bandwidth", kde.bandwidth},
                  {"grid", std::vector<double>(kde.grid.data(), kde.grid.data() + kde.grid.size())},
                  {"density", std::vector<double>(kde.density.data(),
                                                  kde.density.data() + kde.density.size())}};
  }
  if (options.shapiro) {
    doc["shapiro_wilk"] = {{"w", options.shapiro->w},
                           {"p_value", options.shapiro->p_value},
                           {"n_used", options.shapiro->n_used},
                           {"subsampled", options.shapiro->subsampled}};
  }
  if (options.duration_seconds) doc["duration_seconds"] = *options.duration_seconds;
  return doc;
}

std::string report_grid_csv(const TestResult& result, const ReportOptions& options) {
  std::ostringstream out;
  if (options.kde) {
    out << "grid_point,density\n";
    const auto& kde = *options.kde;
    for (Eigen::Index i = 0; i < kde.grid.size(); ++i)
      out << format_double(kde.grid[i]) << ',' << format_double(kde.density[i]) << '\n';
    return out.str();
  }
  if (!result.family.has_histogram())
    throw DomainError("report_grid_csv: no grid available for this result");
  out << "bin_mid,count\n";
  const Eigen::VectorXd mids = histogram_midpoints(result.family);
  const auto bins = result.family.histogram();
  for (std::size_t b = 0; b < bins.size(); ++b)
    out << format_double(mids[static_cast<Eigen::Index>(b)]) << ',' << bins[b] << '\n';
  return out.str();
}

}  // namespace derange
