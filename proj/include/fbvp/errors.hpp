#pragma once

#include <stdexcept>
#include <string>

namespace fbvp {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// rho must be strictly positive in the growth numbers.
class RhoNonpositiveError : public Error {
 public:
  explicit RhoNonpositiveError(double rho)
      : Error("rho must be > 0, got " + std::to_string(rho)) {}
};

// The cone constant c must lie in (0, 1].
class CInvalidError : public Error {
 public:
  explicit CInvalidError(double c)
      : Error("cone constant c must lie in (0,1], got " + std::to_string(c)) {}
};

// [a,b] violates the constraints of the requested kernel family.
class IntervalInvalidError : public Error {
 public:
  explicit IntervalInvalidError(const std::string& constraint)
      : Error("invalid interval [a,b]: " + constraint) {}
};

// The family/mode combination has no known envelope.
class ModeUnsupportedError : public Error {
 public:
  explicit ModeUnsupportedError(const std::string& what) : Error(what) {}
};

// alpha[gamma] must lie in [0,1).
class AlphaGammaInvalidError : public Error {
 public:
  explicit AlphaGammaInvalidError(double value)
      : Error("alpha[gamma] must lie in [0,1), got " + std::to_string(value)) {}
};

// The delay must satisfy r < b-a; otherwise the inner interval [a+r,b] is empty.
class DelayTooLargeError : public Error {
 public:
  DelayTooLargeError(double r, double a, double b)
      : Error("delay r=" + std::to_string(r) + " must be < b-a=" +
              std::to_string(b - a)) {}
};

// rho must exceed the sup norm of the initial datum.
class RhoTooSmallError : public Error {
 public:
  RhoTooSmallError(double rho, double psi_norm)
      : Error("rho=" + std::to_string(rho) +
              " must exceed ||psi|| = " + std::to_string(psi_norm)) {}
};

// A user-supplied nonlinearity returned a negative value.
class NegativeValueError : public Error {
 public:
  NegativeValueError(double t, double value)
      : Error("nonlinearity returned " + std::to_string(value) + " < 0 at t=" +
              std::to_string(t)) {}
};

// Problem configuration could not be parsed or is inconsistent.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace fbvp
