#pragma once

#include <stdexcept>
#include <string>

namespace cseval {

// Bad user input: malformed files, out-of-range values, invalid configs.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure during execution: non-finite loss, unwritable output, missing data
// discovered mid-run. The CLI maps this to exit code 2.
class ExecutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cseval
