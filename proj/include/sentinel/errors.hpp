#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sentinel {

// Invalid arguments or violated preconditions.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Semantically invalid data (datasets, outcome lists, configs).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; carries the 1-based line number.
struct ParseError : DataError {
  ParseError(const std::string& msg, std::size_t line_number)
      : DataError(msg + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  std::size_t line;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quantity required to be bounded away from zero collapsed.
struct DegeneracyError : NumericError {
  using NumericError::NumericError;
};

// Budget cannot support any feasible design.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative solver failed to converge.
struct OptimizationError : NumericError {
  using NumericError::NumericError;
};

}  // namespace sentinel
