#pragma once

#include <stdexcept>
#include <string>

namespace qapprox {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not fit together (register widths, dimensions, stage counts).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Payloads that violate a numeric contract (non-unitary matrix, bad norm).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The input function cannot answer a query it is asked.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed a configured resource budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qapprox
