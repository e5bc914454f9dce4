#pragma once

#include <stdexcept>
#include <string>

namespace pcsf {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain where the flow or a formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A grid is too small to represent the retained band without loss.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or non-finite input data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Brute-force evaluation requested beyond its cost guard.
class OversizeError : public Error {
 public:
  using Error::Error;
};

/// Post-processing could not produce a meaningful estimate.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

/// Time stepping failed (non-finite derivative).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcsf
