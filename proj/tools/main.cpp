#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "derange/csv.hpp"
#include "derange/derangements.hpp"
#include "derange/engine.hpp"
#include "derange/errors.hpp"
#include "derange/kde.hpp"
#include "derange/report.hpp"
#include "derange/version.hpp"

namespace {

// Exit codes: 0 ok, 2 usage, 3 input/output format or I/O, 4 domain, 5 size refusal.
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitDomain = 4;
constexpr int kExitRefusal = 5;
constexpr int kExitInternal = 70;

int default_threads() {
  if (const char* env = std::getenv("DERANGE_THREADS")) {
    const int value = std::atoi(env);
    if (value >= 1) return value;
  }
  return 1;
}

std::string mapping_csv(const Eigen::VectorXi& mapping) {
  std::string line;
  for (Eigen::Index j = 0; j < mapping.size(); ++j) {
    if (j) line.push_back(',');
    line += std::to_string(mapping[j]);
  }
  return line;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw derange::ParseError("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw derange::ParseError("failed writing output file '" + path + "'");
}

char parse_delimiter(const std::string& value) {
  if (value.size() != 1) throw derange::DomainError("--delimiter expects a single character");
  return value[0];
}

std::optional<double> parse_bandwidth(const std::string& value) {
  if (value == "silverman") return std::nullopt;
  try {
    const double h = std::stod(value);
    if (h > 0.0) return h;
  } catch (const std::exception&) {
  }
  throw derange::DomainError("--bandwidth expects a positive number or 'silverman'");
}

std::string grid_csv(const derange::KdeGrid& grid) {
  std::string out = "grid_point,density\n";
  for (Eigen::Index i = 0; i < grid.grid.size(); ++i) {
    out += derange::format_double(grid.grid[i]);
    out.push_back(',');
    out += derange::format_double(grid.density[i]);
    out.push_back('\n');
  }
  return out;
}

struct TestCli {
  std::string input;
  std::string stat = "slope";
  std::string mode = "exact";
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  bool kde = false;
  bool shapiro = false;
  int bins = 256;
  std::string center = "mean";
  int threads = default_threads();
  int max_exact_n = derange::kDefaultEnumerationCap;
  std::uint64_t retention_cap = std::uint64_t{1} << 24;
  std::string delimiter = ",";
  bool timing = false;
  std::string kde_bandwidth = "silverman";
  int kde_grid = 512;
};

int run_test(const TestCli& cli, bool samples_given) {
  using Clock = std::chrono::steady_clock;

  if (samples_given && cli.mode != "mc")
    throw derange::DomainError("--samples is only valid with --mode mc");

  const char delim = parse_delimiter(cli.delimiter);
  const derange::InputTable table = derange::read_paired_csv_file(cli.input, delim);
  const derange::PairedSample sample(table.x, table.y);

  derange::TestConfig cfg;
  cfg.statistic = derange::statistic_from_name(cli.stat);
  cfg.mode = cli.mode == "mc" ? derange::TestMode::MonteCarlo : derange::TestMode::Exact;
  cfg.mc_samples = cli.samples;
  cfg.seed = cli.seed;
  cfg.retention_cap = cli.retention_cap;
  cfg.histogram_bins = cli.bins;
  cfg.max_exact_n = cli.max_exact_n;
  cfg.center = cli.center == "zero" ? derange::TwoSidedCenter::Zero
                                    : derange::TwoSidedCenter::FamilyMean;
  cfg.threads = cli.threads;

  const auto start = Clock::now();
  const derange::TestResult result = derange::derangement_test(sample, cfg);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  std::cerr << "derange: " << derange::to_string(result.mode) << " family of "
            << result.family_size << " members in " << seconds << " s\n";

  derange::ReportOptions options;
  options.input_path = cli.input;
  options.input_rows = static_cast<std::uint64_t>(table.rows());
  options.had_header = table.had_header;
  if (cli.kde) {
    derange::KdeConfig kcfg;
    kcfg.bandwidth = parse_bandwidth(cli.kde_bandwidth);
    kcfg.grid_points = cli.kde_grid;
    options.kde = derange::family_kde(result, kcfg);
  }
  if (cli.shapiro) options.shapiro = derange::family_shapiro(result, cli.seed);
  if (cli.timing) options.duration_seconds = seconds;

  if (cli.format == "csv") {
    write_output(cli.out, derange::report_grid_csv(result, options));
  } else {
    write_output(cli.out, derange::build_report(result, options).dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and Monte Carlo permutation testing over derangements "
               "(fixed-point-free reorderings) of a paired sample."};
  app.set_version_flag("--version", std::string(derange::kToolVersion));
  app.require_subcommand(1);

  // count
  int count_n = 0;
  auto* cmd_count = app.add_subcommand("count", "Print the exact number of derangements of {1..n}");
  cmd_count->add_option("n", count_n, "sequence length")->required();

  // enumerate
  int enum_n = 0;
  std::uint64_t enum_limit = 0;
  int enum_cap = derange::kDefaultEnumerationCap;
  auto* cmd_enum =
      app.add_subcommand("enumerate", "List derangements in lexicographic order, one per line");
  cmd_enum->add_option("n", enum_n, "sequence length")->required();
  cmd_enum->add_option("--limit", enum_limit, "stop after this many (0 = all)");
  cmd_enum->add_option("--max-n", enum_cap, "enumeration size cap override");

  // sample
  int sample_n = 0;
  std::uint64_t sample_count = 1;
  std::uint64_t sample_seed = 0;
  auto* cmd_sample = app.add_subcommand("sample", "Draw uniform random derangements");
  cmd_sample->add_option("n", sample_n, "sequence length")->required();
  cmd_sample->add_option("--count", sample_count, "number of draws");
  cmd_sample->add_option("--seed", sample_seed, "generator seed");

  // test
  TestCli test_cli;
  auto* cmd_test = app.add_subcommand(
      "test", "Run the derangement permutation test on a two-column CSV (x, y)");
  cmd_test->add_option("input", test_cli.input, "CSV file with x and y columns")->required();
  cmd_test->add_option("--stat", test_cli.stat, "statistic to distribute over the family")
      ->check(CLI::IsMember({"slope", "pearson", "cov"}));
  cmd_test->add_option("--mode", test_cli.mode, "exact enumeration or Monte Carlo")
      ->check(CLI::IsMember({"exact", "mc"}));
  auto* samples_opt =
      cmd_test->add_option("--samples", test_cli.samples, "Monte Carlo draw count");
  cmd_test->add_option("--seed", test_cli.seed, "generator seed");
  cmd_test->add_option("--out", test_cli.out, "output path (default stdout)");
  cmd_test->add_option("--format", test_cli.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd_test->add_flag("--kde", test_cli.kde, "include a density grid over the family");
  cmd_test->add_flag("--shapiro", test_cli.shapiro, "include the normality diagnostic");
  cmd_test->add_option("--bins", test_cli.bins, "histogram bin count");
  cmd_test->add_option("--center", test_cli.center, "two-sided tail center")
      ->check(CLI::IsMember({"mean", "zero"}));
  cmd_test->add_option("--threads", test_cli.threads,
                       "worker count (results are identical for any value)");
  cmd_test->add_option("--max-exact-n", test_cli.max_exact_n, "exact-mode size cap override");
  cmd_test->add_option("--retention-cap", test_cli.retention_cap,
                       "max family values kept in memory");
  cmd_test->add_option("--delimiter", test_cli.delimiter, "field delimiter");
  cmd_test->add_flag("--timing", test_cli.timing, "include wall-clock duration in the report");
  cmd_test->add_option("--kde-bandwidth", test_cli.kde_bandwidth,
                       "KDE bandwidth ('silverman' or a number)");
  cmd_test->add_option("--kde-grid", test_cli.kde_grid, "KDE grid points");

  // kde
  std::string kde_input, kde_bandwidth = "silverman", kde_out, kde_delimiter = ",";
  int kde_grid = 512;
  std::pair<double, double> kde_range{0.0, 0.0};
  auto* cmd_kde =
      app.add_subcommand("kde", "Gaussian kernel density grid for a single column of values");
  cmd_kde->add_option("input", kde_input, "file with one value per line")->required();
  cmd_kde->add_option("--bandwidth", kde_bandwidth, "'silverman' or a positive number");
  cmd_kde->add_option("--grid", kde_grid, "grid points");
  auto* range_opt = cmd_kde->add_option("--range", kde_range, "grid range (lo hi)");
  cmd_kde->add_option("--out", kde_out, "output path (default stdout)");
  cmd_kde->add_option("--delimiter", kde_delimiter, "field delimiter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*cmd_count) {
      std::cout << derange::count_derangements(count_n).str() << '\n';
    } else if (*cmd_enum) {
      std::uint64_t printed = 0;
      derange::enumerate_derangements(
          enum_n,
          [&](const Eigen::VectorXi& mapping) -> bool {
            std::cout << mapping_csv(mapping) << '\n';
            ++printed;
            return enum_limit == 0 || printed < enum_limit;
          },
          enum_cap);
    } else if (*cmd_sample) {
      auto rng = derange::substream_rng(sample_seed, 0);
      for (std::uint64_t k = 0; k < sample_count; ++k)
        std::cout << mapping_csv(derange::sample_derangement(sample_n, rng)) << '\n';
    } else if (*cmd_test) {
      return run_test(test_cli, samples_opt->count() > 0);
    } else if (*cmd_kde) {
      derange::KdeConfig cfg;
      cfg.bandwidth = parse_bandwidth(kde_bandwidth);
      cfg.grid_points = kde_grid;
      if (range_opt->count() > 0) cfg.range = kde_range;
      const Eigen::VectorXd values =
          derange::read_values_file(kde_input, parse_delimiter(kde_delimiter));
      write_output(kde_out, grid_csv(derange::kde_density(values, cfg)));
    }
    return 0;
  } catch (const derange::ParseError& e) {
    std::cerr << "parse error";
    if (e.row() > 0) std::cerr << " at row " << e.row() << ", column " << e.column();
    std::cerr << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const derange::SizeRefusalError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefusal;
  } catch (const derange::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
