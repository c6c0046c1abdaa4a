#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nlcs/log_complex.hpp"

namespace nlcs {

enum class Family { Identity, BetaExp, BetaImaginary, LambdaExp, QExp, QSinh };

std::string_view family_name(Family f);
/// Accepts the names produced by family_name(); throws std::invalid_argument otherwise.
Family parse_family(std::string_view name);

/// Which intensity-dependent function f(n) deforms the ladder operators, with its parameter.
///
/// Construct through the named factories; they enforce the parameter ranges
/// (beta >= 0 for BetaExp, q >= 1 for QExp/QSinh, finite values throughout).
class Nonlinearity {
 public:
  static Nonlinearity identity();
  /// f(n) = e^{beta n}
  static Nonlinearity beta_exp(double beta);
  /// f(n) = e^{i beta n}; pseudo-canonical, Poissonian photon statistics.
  static Nonlinearity beta_imaginary(double beta);
  /// f(n) = e^{lambda/n} / sqrt(n); lambda = 0 gives harmonious states.
  static Nonlinearity lambda_exp(double lambda);
  /// f(n) = q^n, the beta = ln q reparametrization.
  static Nonlinearity q_exp(double q);
  /// f(n) = sqrt(sinh(gamma n) / (n sinh gamma)), gamma = ln q.
  static Nonlinearity q_sinh(double q);
  /// Generic factory used by parsers; param is ignored for Identity.
  static Nonlinearity make(Family family, double param);

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] double param() const { return param_; }
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const Nonlinearity&, const Nonlinearity&) = default;

 private:
  Nonlinearity(Family f, double p) : family_(f), param_(p) {}
  Family family_ = Family::Identity;
  double param_ = 0.0;
};

/// |f(n)| for n >= 1 (BetaImaginary reports the unit magnitude). Throws DomainError for n < 1.
double f_value(const Nonlinearity& spec, long long n);

/// ln f(n) for n >= 1 as a LogComplex (carries the BetaImaginary phase).
LogComplex log_f_value(const Nonlinearity& spec, std::size_t n);

/// [f(n)]! = prod_{m=1}^{n} f(m), with [f(0)]! = 1. Closed forms where they exist.
LogComplex log_f_factorial(const Nonlinearity& spec, std::size_t n);

/// ln |f(n)|^2 for n >= 1; the building block of commutators and term ratios.
double log_f_squared(const Nonlinearity& spec, std::size_t n);

/// sqrt(lim n |f(n)|^2); +inf for the whole-plane families, 1 for LambdaExp.
double domain_radius(const Nonlinearity& spec);

/// Eigenvalue of [A, A^dagger] on |n>: (n+1)|f(n+1)|^2 - n|f(n)|^2.
double deformed_commutator_diag(const Nonlinearity& spec, std::size_t n);

struct SpectrumLevel {
  std::size_t n;
  double energy;
};

struct SpectrumSlice {
  Nonlinearity spec;
  std::vector<SpectrumLevel> levels;
};

/// Levels 0..n_max of H = (A A^dagger + A^dagger A)/2. Throws DomainError if an energy overflows.
SpectrumSlice hamiltonian_spectrum(const Nonlinearity& spec, std::size_t n_max);

}  // namespace nlcs
