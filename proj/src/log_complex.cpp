#include "nlcs/log_complex.hpp"

#include <numbers>

namespace nlcs {

double wrap_phase(double phase) {
  if (!std::isfinite(phase)) return phase;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(phase, two_pi);  // in [-pi, pi]
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

LogComplex LogComplex::from_complex(std::complex<double> v) {
  const double mag = std::abs(v);
  if (mag == 0.0) return zero();
  return {std::log(mag), wrap_phase(std::arg(v))};
}

LogComplex LogComplex::polar_log(double log_magnitude, double phase) {
  if (log_magnitude == -std::numeric_limits<double>::infinity()) return zero();
  return {log_magnitude, wrap_phase(phase)};
}

std::complex<double> LogComplex::to_complex() const {
  if (is_zero()) return {0.0, 0.0};
  return std::polar(std::exp(log_magnitude), phase);
}

LogComplex& LogComplex::operator*=(const LogComplex& rhs) {
  if (is_zero() || rhs.is_zero()) {
    *this = zero();
    return *this;
  }
  log_magnitude += rhs.log_magnitude;
  phase = wrap_phase(phase + rhs.phase);
  return *this;
}

LogComplex& LogComplex::operator/=(const LogComplex& rhs) {
  if (rhs.is_zero()) {
    log_magnitude = std::numeric_limits<double>::infinity();
    phase = 0.0;
    return *this;
  }
  if (is_zero()) return *this;
  log_magnitude -= rhs.log_magnitude;
  phase = wrap_phase(phase - rhs.phase);
  return *this;
}

LogComplex operator+(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const LogComplex& big = a.log_magnitude >= b.log_magnitude ? a : b;
  const LogComplex& small = a.log_magnitude >= b.log_magnitude ? b : a;
  // big * (1 + small/big), ratio magnitude <= 1
  const std::complex<double> ratio =
      std::polar(std::exp(small.log_magnitude - big.log_magnitude), small.phase - big.phase);
  const std::complex<double> factor = 1.0 + ratio;
  const double mag = std::abs(factor);
  if (mag == 0.0) return LogComplex::zero();
  return LogComplex::polar_log(big.log_magnitude + std::log(mag), big.phase + std::arg(factor));
}

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    compensation_ += (sum_ - t) + v;
  } else {
    compensation_ += (v - t) + sum_;
  }
  sum_ = t;
}

void LogSumExp::add(double log_term) {
  if (log_term == -std::numeric_limits<double>::infinity()) return;
  if (log_term > anchor_) {
    if (anchor_ != -std::numeric_limits<double>::infinity()) {
      scaled_.scale(std::exp(anchor_ - log_term));
    }
    anchor_ = log_term;
  }
  scaled_.add(std::exp(log_term - anchor_));
}

double LogSumExp::value() const {
  if (anchor_ == -std::numeric_limits<double>::infinity()) return anchor_;
  return anchor_ + std::log(scaled_.value());
}

double log_sum_exp(std::span<const double> log_terms) {
  LogSumExp acc;
  for (double t : log_terms) acc.add(t);
  return acc.value();
}

}  // namespace nlcs
