#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dualcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Input that violates a documented precondition (dimension mismatch,
/// non-symmetric matrix, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid or inconsistent solver/method configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested operation is not defined for this problem class.
class UnsupportedProblemError : public std::runtime_error {
 public:
  explicit UnsupportedProblemError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Inner Lagrangian solve ran out of iterations. Carries the best iterate
/// found so far and its fixed-point residual.
class OracleFailure : public std::runtime_error {
 public:
  OracleFailure(const std::string& what, Vector best, double residual,
                int iterations)
      : std::runtime_error(what),
        best_iterate(std::move(best)),
        residual(residual),
        iterations(iterations) {}

  Vector best_iterate;
  double residual = 0.0;
  int iterations = 0;
};

/// A certificate was asked to use a reference solution that contradicts the
/// measured data (e.g. d(u) > d*).
class ReferenceInconsistency : public std::runtime_error {
 public:
  explicit ReferenceInconsistency(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace dualcert
