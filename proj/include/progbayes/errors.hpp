#pragma once

#include <stdexcept>
#include <string>

namespace progbayes {

/// Raised when an input file (trial or historical CSV, config JSON) cannot be
/// parsed or fails validation. Messages name the offending row/column.
class LoadError : public std::runtime_error {
  public:
    explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a computation cannot proceed: singular design, numerically
/// singular posterior precision, inconsistent intermediate results.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace progbayes
