#pragma once

#include <stdexcept>
#include <string>

namespace frost {

/// Raised for malformed or invariant-violating data (ingestion, configs,
/// model files). Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when an optimization run aborts (non-finite loss, degenerate
/// training state). Maps to CLI exit code 3.
class TrainError : public std::runtime_error {
 public:
  explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace frost
