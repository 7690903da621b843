#include "derange/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace derange {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

enum class FieldParse { Ok, Malformed, NonFinite };

FieldParse classify_field(const std::string& field, double& value) {
  std::string t = trim(field);
  if (!t.empty() && t[0] == '+') t.erase(0, 1);  // from_chars takes no leading '+'
  if (t.empty()) return FieldParse::Malformed;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || end != t.data() + t.size()) return FieldParse::Malformed;
  return std::isfinite(value) ? FieldParse::Ok : FieldParse::NonFinite;
}

bool parses_as_double(const std::string& field) {
  double value;
  return classify_field(field, value) == FieldParse::Ok;
}

struct Record {
  std::size_t row = 0;
  std::vector<std::string> fields;
};

std::vector<Record> read_records(std::istream& in, char delimiter) {
  std::vector<Record> records;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;  // blank separators / trailing newline
    records.push_back({row, split_record(line, delimiter, row)});
  }
  return records;
}

}  // namespace

std::vector<std::string> split_record(const std::string& line, char delimiter, std::size_t row) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      if (field_started && !field.empty())
        throw ParseError("stray quote inside unquoted field", row, fields.size() + 1);
      quoted = true;
      field_started = true;
    } else if (ch == delimiter) {
      fields.push_back(field);
      field.clear();
      field_started = false;
    } else {
      field.push_back(ch);
      field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", row, fields.size() + 1);
  fields.push_back(field);
  return fields;
}

double parse_double(const std::string& field, std::size_t row, std::size_t column) {
  double value;
  switch (classify_field(field, value)) {
    case FieldParse::Ok:
      return value;
    case FieldParse::NonFinite:
      throw ParseError("value '" + field + "' is not finite", row, column);
    case FieldParse::Malformed:
      break;
  }
  throw ParseError("cannot parse '" + field + "' as a number", row, column);
}

InputTable read_paired_csv(std::istream& in, const std::string& source, char delimiter) {
  InputTable table;
  table.source = source;
  table.delimiter = delimiter;

  auto records = read_records(in, delimiter);
  std::size_t start = 0;
  if (!records.empty() && records[0].fields.size() >= 2 &&
      (!parses_as_double(records[0].fields[0]) || !parses_as_double(records[0].fields[1]))) {
    table.had_header = true;
    start = 1;
  }

  std::vector<double> xs, ys;
  for (std::size_t i = start; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.fields.size() != 2)
      throw ParseError("expected 2 fields, got " + std::to_string(rec.fields.size()), rec.row,
                       rec.fields.size());
    xs.push_back(parse_double(rec.fields[0], rec.row, 1));
    ys.push_back(parse_double(rec.fields[1], rec.row, 2));
  }
  if (xs.size() < 3)
    throw DomainError(source + ": need n >= 3 data rows, got " + std::to_string(xs.size()));

  table.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  table.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return table;
}

InputTable read_paired_csv_file(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_paired_csv(in, path, delimiter);
}

Eigen::VectorXd read_values(std::istream& in, const std::string& source, char delimiter) {
  auto records = read_records(in, delimiter);
  std::size_t start = 0;
  if (!records.empty() && !parses_as_double(records[0].fields[0])) start = 1;

  std::vector<double> values;
  for (std::size_t i = start; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.fields.size() != 1)
      throw ParseError("expected a single value per line, got " +
                           std::to_string(rec.fields.size()) + " fields",
                       rec.row, rec.fields.size());
    values.push_back(parse_double(rec.fields[0], rec.row, 1));
  }
  if (values.empty()) throw DomainError(source + ": no values");
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::VectorXd read_values_file(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_values(in, path, delimiter);
}

std::string format_double(double value) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

}  // namespace derange
