#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace spsdgeo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input validation failures (bad shapes, malformed files, bad configs).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class LengthMismatch : public Error {
 public:
  using Error::Error;
};
class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};
class EmptySet : public Error {
 public:
  using Error::Error;
};
class EmptyClass : public Error {
 public:
  using Error::Error;
};
class TooFewPoints : public Error {
 public:
  using Error::Error;
};
class InvalidComponentCount : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class ParseError : public Error {
 public:
  using Error::Error;
};
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};
class InvariantViolation : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

// Numerical failures.
class NonFinite : public Error {
 public:
  using Error::Error;
};
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};
class SubspaceTooFar : public Error {
 public:
  using Error::Error;
};
class NotAligned : public Error {
 public:
  using Error::Error;
};
class BaseMismatch : public Error {
 public:
  using Error::Error;
};
class ZeroVector : public Error {
 public:
  using Error::Error;
};
class ZeroVariance : public Error {
 public:
  using Error::Error;
};

class RankMismatch : public Error {
 public:
  RankMismatch(const std::string& what, int actual)
      : Error(what), actual_rank(actual) {}
  int actual_rank;
};

// Carries the last iterate so callers can inspect a stalled mean.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, Eigen::MatrixXd iterate, int iters,
                double residual)
      : Error(what),
        last_iterate(std::move(iterate)),
        iterations(iters),
        final_residual(residual) {}
  Eigen::MatrixXd last_iterate;
  int iterations;
  double final_residual;
};

}  // namespace spsdgeo
