#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

#include "derange/errors.hpp"

namespace derange {

struct InputTable {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  std::string source;
  bool had_header = false;
  char delimiter = ',';

  Eigen::Index rows() const { return x.size(); }
};

/// Splits one record into fields. Quoted fields may contain the delimiter;
/// a doubled quote inside a quoted field is a literal quote. Multi-line
/// fields are not supported (the payloads here are numeric).
std::vector<std::string> split_record(const std::string& line, char delimiter, std::size_t row);

/// Two-column numeric CSV. A non-numeric first row is treated as a header.
/// Requires at least 3 data rows, exactly two fields per row, finite values.
InputTable read_paired_csv(std::istream& in, const std::string& source, char delimiter = ',');
InputTable read_paired_csv_file(const std::string& path, char delimiter = ',');

/// Single-column numeric input, one value per line (non-numeric first row
/// tolerated as a header).
Eigen::VectorXd read_values(std::istream& in, const std::string& source, char delimiter = ',');
Eigen::VectorXd read_values_file(const std::string& path, char delimiter = ',');

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Strict finite-double field parse; throws ParseError with 1-based row/column.
double parse_double(const std::string& field, std::size_t row, std::size_t column);

}  // namespace derange
