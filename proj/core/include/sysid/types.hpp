#ifndef SYSID_TYPES_HPP
#define SYSID_TYPES_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sysid {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error hierarchy. Every failure raised by the library derives from Error so
// callers can catch at whatever granularity they need.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A model or oracle produced a non-finite value or a wrongly sized output.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// A covariance could not be factored even after jitter.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

// The trust-region secular equation did not converge.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Input design could not produce a finite objective from any start.
class DesignError : public Error {
 public:
  using Error::Error;
};

// Mismatched vector/matrix dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sysid

#endif  // SYSID_TYPES_HPP
