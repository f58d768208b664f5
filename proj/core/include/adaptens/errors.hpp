#pragma once

#include <stdexcept>
#include <string>

namespace adaptens {

// Malformed or inconsistent input data (CSV rows, schema mismatches,
// invariant violations at ingestion).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (singular systems, degenerate scales).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace adaptens
