#pragma once

#include <stdexcept>
#include <string>

namespace nlbif {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem instance violates a hard requirement (dimension, exponent, positivity of f or P).
class InvalidInstance : public Error {
 public:
  using Error::Error;
};

/// A kernel table contains a negative or non-finite sample.
class InvalidKernel : public Error {
 public:
  using Error::Error;
};

/// Grid parameters out of range.
class InvalidGrid : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or field file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iterative method ran out of iterations. Carries the last residual.
class IterationLimit : public Error {
 public:
  IterationLimit(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// A linear system that should be nonsingular was found singular.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// The verification suite was not given a required fixture instance.
class MissingFixture : public Error {
 public:
  using Error::Error;
};

}  // namespace nlbif
