#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace derange {

/// Input violates an operation's preconditions (degenerate data, bad argument).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// A job was refused because its exact size falls outside the configured range.
class SizeRefusalError : public std::runtime_error {
 public:
  explicit SizeRefusalError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed text input; carries the 1-based row/column when known (0 = unknown).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : std::runtime_error(what), row_(row), column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace derange
