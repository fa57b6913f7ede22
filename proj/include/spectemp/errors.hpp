#pragma once

#include <stdexcept>
#include <string>

namespace spectemp {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-facing parameter (n < 2, p outside [0,1], bad flag value...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input violates a documented precondition (asymmetric matrix, non-PSD covariance).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Normalized Laplacian requested for a graph with an isolated node.
class DegenerateDegreeError : public Error {
 public:
  using Error::Error;
};

// Rank/nullspace query on an all-zero matrix.
class DegenerateMatrixError : public Error {
 public:
  using Error::Error;
};

class MissingInputError : public Error {
 public:
  using Error::Error;
};

// Zero or several same-sign template columns when one is required.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

// Recovery LP has no feasible point: the templates cannot realize a shift
// of the requested kind.
class InfeasibleTemplates : public Error {
 public:
  using Error::Error;
};

// Solver hit its iteration cap or broke down numerically.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class AllZeroRecovery : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spectemp
