#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>

namespace nlcs {

/// Complex number stored as (ln|v|, arg v). Zero is (-inf, 0).
struct LogComplex {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  double phase = 0.0;

  static LogComplex zero() { return {}; }
  static LogComplex one() { return {0.0, 0.0}; }
  static LogComplex from_complex(std::complex<double> v);
  /// Builds a value and wraps the phase into (-pi, pi].
  static LogComplex polar_log(double log_magnitude, double phase);

  [[nodiscard]] bool is_zero() const { return log_magnitude == -std::numeric_limits<double>::infinity(); }
  [[nodiscard]] std::complex<double> to_complex() const;

  LogComplex& operator*=(const LogComplex& rhs);
  LogComplex& operator/=(const LogComplex& rhs);
  friend LogComplex operator*(LogComplex a, const LogComplex& b) { return a *= b; }
  friend LogComplex operator/(LogComplex a, const LogComplex& b) { return a /= b; }
  friend LogComplex operator+(const LogComplex& a, const LogComplex& b);
  friend bool operator==(const LogComplex&, const LogComplex&) = default;
};

/// Maps any angle into (-pi, pi].
double wrap_phase(double phase);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v);
  void scale(double factor) {
    sum_ *= factor;
    compensation_ *= factor;
  }
  [[nodiscard]] double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Accumulates ln(sum e^{x_i}) anchored at the running maximum.
class LogSumExp {
 public:
  void add(double log_term);
  /// ln of the accumulated sum; -inf when empty or all terms were -inf.
  [[nodiscard]] double value() const;
  [[nodiscard]] double max_log() const { return anchor_; }

 private:
  double anchor_ = -std::numeric_limits<double>::infinity();
  CompensatedSum scaled_;
};

double log_sum_exp(std::span<const double> log_terms);

}  // namespace nlcs
