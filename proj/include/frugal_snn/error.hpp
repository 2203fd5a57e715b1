#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frugal_snn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t row, std::size_t column,
             const std::string& what)
      : Error(format(path, row, column, what)), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& path, std::size_t row,
                            std::size_t column, const std::string& what) {
    std::string msg = path;
    if (row > 0) msg += ":" + std::to_string(row);
    if (column > 0) msg += ":" + std::to_string(column);
    return msg + ": " + what;
  }

  std::size_t row_;
  std::size_t column_;
};

/// Invalid argument or precondition violation in a library call.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Bad configuration (unknown preset, missing key, out-of-range value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace frugal_snn
