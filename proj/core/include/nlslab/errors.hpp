#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nlslab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad sizes, malformed scenario files, inconsistent options.
class ConfigurationError : public Error {
public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. s < 0).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Non-finite values produced during time stepping.
class BlowUpError : public Error {
public:
  using Error::Error;
};

/// A spectral window does not hold exactly two periodic eigenvalues.
class ResolutionError : public Error {
public:
  using Error::Error;
};

/// Contour or branch evaluation requested where it is not defined.
class GeometryError : public Error {
public:
  using Error::Error;
};

class BranchError : public GeometryError {
public:
  using GeometryError::GeometryError;
};

/// Newton iteration failed to converge.
class SolverError : public Error {
public:
  using Error::Error;
};

/// Failure inside one stage of a scenario run; what() starts with the stage.
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& message)
      : Error("stage '" + stage + "': " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

/// Violated internal invariant; indicates a bug rather than bad input.
class InternalError : public Error {
public:
  using Error::Error;
};

}  // namespace nlslab
