#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dfock {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the region where an object is defined or trusted
/// (grid hull, kernel trust radius, table range).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// An integrand produced NaN or infinity at a quadrature node.
class PoisonedIntegrand : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// Malformed user input: configs, CSV files, point sets, dimensions.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace dfock
