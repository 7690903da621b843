#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "derange/engine.hpp"
#include "derange/kde.hpp"
#include "derange/shapiro_wilk.hpp"

namespace derange {

struct ReportOptions {
  std::string input_path;
  std::uint64_t input_rows = 0;
  bool had_header = false;
  bool include_histogram = true;
  std::optional<KdeGrid> kde;
  std::optional<SwResult> shapiro;
  /// Off by default so that identical runs emit identical reports.
  std::optional<double> duration_seconds;
};

/// KDE over the family values: directly over the retained values, or over
/// histogram bin midpoints (count-weighted) when the family was not retained.
KdeGrid family_kde(const TestResult& result, KdeConfig cfg);

/// Shapiro-Wilk over the retained family values.
SwResult family_shapiro(const TestResult& result, std::uint64_t seed);

nlohmann::json build_report(const TestResult& result, const ReportOptions& options);

/// The distribution grid as CSV rows: the KDE grid when present, otherwise
/// histogram bin midpoints with counts.
std::string report_grid_csv(const TestResult& result, const ReportOptions& options);

}  // namespace derange
