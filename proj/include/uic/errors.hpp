#ifndef UIC_ERRORS_HPP_
#define UIC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace uic {

/// Invalid argument values: probabilities outside [0,1], hyperparameters
/// outside their declared ranges, dimension mismatches, non-PD covariances.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested an operation a loss family does not support (e.g. the
/// asymptotic f-function of the erf loss).
class UnsupportedFamilyError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Numerical failure at runtime: solver divergence, singular systems,
/// densities underflowing to zero everywhere.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration parse/validation failure. Messages carry the JSON path
/// of the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem I/O failure. Messages carry the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uic

#endif  // UIC_ERRORS_HPP_
