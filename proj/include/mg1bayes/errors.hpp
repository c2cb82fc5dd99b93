#pragma once
// Error taxonomy. ConfigError covers invalid parameters, configs, and
// inconsistent truncation requests (CLI exit code 2); the remaining types are
// runtime/numeric failures (CLI exit code 1).

#include <stdexcept>
#include <string>

namespace mg1bayes {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration, including truncation requests that a
// prior or a dataset cannot satisfy.
struct ConfigError : Error {
  using Error::Error;
};

// Data a routine cannot consume (censored entries where unsupported,
// malformed files).
struct DataError : Error {
  using Error::Error;
};

// A stability precondition rho < 1 fails.
struct InstabilityError : Error {
  using Error::Error;
};

// Numeric evaluation outside a valid domain (non-removable singularities,
// undefined moments, degenerate cdf arguments).
struct DomainError : Error {
  using Error::Error;
};

// A posterior update whose denominator degenerates on the grid.
struct DegeneratePriorError : Error {
  using Error::Error;
};

}  // namespace mg1bayes
