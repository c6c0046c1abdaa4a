#include "nlcs/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nlcs/errors.hpp"

namespace nlcs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

// ln sinh(y) for y > 0 without overflow.
double log_sinh(double y) { return y + std::log1p(-std::exp(-2.0 * y)) - std::log(2.0); }

// Harmonic number H_n; the asymptotic tail is exact to rounding above 1000.
double harmonic(std::size_t n) {
  if (n <= 1000) {
    CompensatedSum s;
    for (std::size_t k = n; k >= 1; --k) s.add(1.0 / static_cast<double>(k));
    return s.value();
  }
  const double x = static_cast<double>(n);
  const double inv2 = 1.0 / (x * x);
  return std::log(x) + 0.57721566490153286061 + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0 -
         inv2 * inv2 * inv2 / 252.0;
}

// beta * n(n+1)/2 reduced to (-pi, pi], keeping the low bits of the product.
double triangular_phase(double beta, std::size_t n) {
  const double t = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
  const double hi = beta * t;
  const double lo = std::fma(beta, t, -hi);
  return wrap_phase(wrap_phase(hi) + lo);
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Identity: return "identity";
    case Family::BetaExp: return "beta";
    case Family::BetaImaginary: return "beta-imag";
    case Family::LambdaExp: return "lambda";
    case Family::QExp: return "qexp";
    case Family::QSinh: return "qsinh";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::Identity, Family::BetaExp, Family::BetaImaginary, Family::LambdaExp,
                   Family::QExp, Family::QSinh}) {
    if (family_name(f) == name) return f;
  }
  throw std::invalid_argument("unknown nonlinearity family '" + std::string(name) + "'");
}

Nonlinearity Nonlinearity::identity() { return {Family::Identity, 0.0}; }

Nonlinearity Nonlinearity::beta_exp(double beta) {
  require_finite(beta, "beta");
  if (beta < 0.0) throw DomainError("BetaExp requires beta >= 0 (the domain collapses to a point otherwise)");
  return {Family::BetaExp, beta};
}

Nonlinearity Nonlinearity::beta_imaginary(double beta) {
  require_finite(beta, "beta");
  return {Family::BetaImaginary, beta};
}

Nonlinearity Nonlinearity::lambda_exp(double lambda) {
  require_finite(lambda, "lambda");
  return {Family::LambdaExp, lambda};
}

Nonlinearity Nonlinearity::q_exp(double q) {
  require_finite(q, "q");
  if (q < 1.0) throw DomainError("QExp requires q >= 1");
  return {Family::QExp, q};
}

Nonlinearity Nonlinearity::q_sinh(double q) {
  require_finite(q, "q");
  if (q < 1.0) throw DomainError("QSinh requires q >= 1");
  return {Family::QSinh, q};
}

Nonlinearity Nonlinearity::make(Family family, double param) {
  switch (family) {
    case Family::Identity: return identity();
    case Family::BetaExp: return beta_exp(param);
    case Family::BetaImaginary: return beta_imaginary(param);
    case Family::LambdaExp: return lambda_exp(param);
    case Family::QExp: return q_exp(param);
    case Family::QSinh: return q_sinh(param);
  }
  throw std::invalid_argument("unknown family");
}

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  os << family_name(family_);
  if (family_ != Family::Identity) os << "(" << param_ << ")";
  return os.str();
}

double log_f_squared(const Nonlinearity& spec, std::size_t n) {
  const double x = static_cast<double>(n);
  switch (spec.family()) {
    case Family::Identity:
    case Family::BetaImaginary: return 0.0;
    case Family::BetaExp: return 2.0 * spec.param() * x;
    case Family::LambdaExp: return 2.0 * spec.param() / x - std::log(x);
    case Family::QExp: return 2.0 * x * std::log(spec.param());
    case Family::QSinh: {
      const double gamma = std::log(spec.param());
      if (gamma == 0.0 || n == 1) return 0.0;
      return log_sinh(gamma * x) - std::log(x) - log_sinh(gamma);
    }
  }
  return 0.0;
}

double f_value(const Nonlinearity& spec, long long n) {
  if (n < 1) throw DomainError("f(n) is only evaluated for n >= 1");
  return std::exp(0.5 * log_f_squared(spec, static_cast<std::size_t>(n)));
}

LogComplex log_f_value(const Nonlinearity& spec, std::size_t n) {
  if (n < 1) throw DomainError("f(n) is only evaluated for n >= 1");
  const double phase =
      spec.family() == Family::BetaImaginary ? spec.param() * static_cast<double>(n) : 0.0;
  return LogComplex::polar_log(0.5 * log_f_squared(spec, n), phase);
}

LogComplex log_f_factorial(const Nonlinearity& spec, std::size_t n) {
  if (n == 0) return LogComplex::one();
  const double x = static_cast<double>(n);
  switch (spec.family()) {
    case Family::Identity: return LogComplex::one();
    case Family::BetaExp: return {spec.param() * x * (x + 1.0) / 2.0, 0.0};
    case Family::BetaImaginary: return {0.0, triangular_phase(spec.param(), n)};
    case Family::LambdaExp:
      return {spec.param() * harmonic(n) - 0.5 * std::lgamma(x + 1.0), 0.0};
    case Family::QExp: return {x * (x + 1.0) / 2.0 * std::log(spec.param()), 0.0};
    case Family::QSinh: {
      CompensatedSum s;
      for (std::size_t m = 2; m <= n; ++m) s.add(0.5 * log_f_squared(spec, m));
      return {s.value(), 0.0};
    }
  }
  return LogComplex::one();
}

double domain_radius(const Nonlinearity& spec) {
  return spec.family() == Family::LambdaExp ? 1.0 : kInf;
}

double deformed_commutator_diag(const Nonlinearity& spec, std::size_t n) {
  const double up = static_cast<double>(n + 1) * std::exp(log_f_squared(spec, n + 1));
  const double down =
      n == 0 ? 0.0 : static_cast<double>(n) * std::exp(log_f_squared(spec, n));
  return up - down;
}

SpectrumSlice hamiltonian_spectrum(const Nonlinearity& spec, std::size_t n_max) {
  SpectrumSlice slice{spec, {}};
  slice.levels.reserve(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double up = static_cast<double>(n + 1) * std::exp(log_f_squared(spec, n + 1));
    const double down =
        n == 0 ? 0.0 : static_cast<double>(n) * std::exp(log_f_squared(spec, n));
    const double e = 0.5 * (up + down);
    if (!std::isfinite(e)) {
      throw DomainError("energy of level " + std::to_string(n) + " overflows for " + spec.describe());
    }
    slice.levels.push_back({n, e});
  }
  return slice;
}

}  // namespace nlcs
