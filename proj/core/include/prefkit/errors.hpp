#pragma once

#include <stdexcept>
#include <string>

namespace prefkit {

// Header-level problem in an input table (missing required column, bad layout).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A single data row could not be turned into a record. Carries the 1-based
// line number of the offending row.
struct RowError {
  long line = 0;
  std::string message;
};

// Whole-file structural problem (e.g. a PrefLib panel that is not a
// complete permutation).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric routine failed to produce a result (non-convergence, rank
// deficiency, empty input where a value is required).
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace prefkit
