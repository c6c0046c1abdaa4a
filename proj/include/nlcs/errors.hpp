#pragma once

#include <stdexcept>
#include <string>

namespace nlcs {

/// Requested point lies outside the state's domain or violates a parameter range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series or iteration did not settle within its configured cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Threshold search was called with a bracket whose ends do not straddle the flip.
class BracketError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace nlcs
