#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace designgap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested dense dimension exceeds the configured guardrail.
class GuardrailError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Power iteration did not reach the requested tolerance. Carries the last
/// Ritz estimate and iterate so callers can inspect or fall back.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_estimate, int iterations,
                   Eigen::VectorXcd last_iterate)
      : Error(what),
        last_estimate_(last_estimate),
        iterations_(iterations),
        last_iterate_(std::move(last_iterate)) {}

  double last_estimate() const { return last_estimate_; }
  int iterations() const { return iterations_; }
  const Eigen::VectorXcd& last_iterate() const { return last_iterate_; }

 private:
  double last_estimate_;
  int iterations_;
  Eigen::VectorXcd last_iterate_;
};

/// Malformed gate ensemble (bad probabilities, non-unitary members).
class EnsembleError : public Error {
 public:
  using Error::Error;
};

/// P·R or R·P did not vanish: the moment operator was not built from unitaries.
class OrthogonalityError : public Error {
 public:
  OrthogonalityError(const std::string& what, double left, double right)
      : Error(what), left_(left), right_(right) {}
  double left_norm() const { return left_; }
  double right_norm() const { return right_; }

 private:
  double left_;
  double right_;
};

/// A depth formula was evaluated with a zero gap.
class UnboundedError : public Error {
 public:
  using Error::Error;
};

class ArchitectureError : public Error {
 public:
  using Error::Error;
};

}  // namespace designgap
