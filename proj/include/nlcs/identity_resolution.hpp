#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

namespace nlcs {

/// epsilon_q(z) = sum_n z^n / n! q^{-n(n+1)} for q >= 1, z >= 0.
/// Terms are added until they fall below tol times the partial sum.
double generalized_exp(double q, double z, double tol = 1e-17);
double log_generalized_exp(double q, double z, double tol = 1e-17);

struct DerivativeCheck {
  double lhs;  // central difference of epsilon_q at z
  double rhs;  // q^{-2} epsilon_q(q^{-2} z)
};

/// Requires z > h > 0.
DerivativeCheck generalized_exp_derivative_check(double q, double z, double h);

/// Moment sequence behind the Hankel-Hadamard matrices.
enum class HankelConvention {
  MomentTargets,  // s_k = k! q^{2k(k+1)}, the moments the weight must reproduce
  AsPrinted,      // s_k = k! q^{-2k(k+1)}
};

struct SignedLog {
  int sign = 0;  // -1, 0, +1
  double log_abs = 0.0;
  [[nodiscard]] double value() const;
};

struct HankelMinors {
  std::vector<double> minors0;  // leading minors of h0(i, j) = s_{i+j-2}
  std::vector<double> minors1;  // leading minors of h1(i, j) = s_{i+j-1}
  std::vector<SignedLog> log_minors0;
  std::vector<SignedLog> log_minors1;
};

/// Requires q >= 1 and 1 <= size <= 8.
HankelMinors hankel_hadamard_minors(double q, std::size_t size,
                                    HankelConvention convention = HankelConvention::MomentTargets);

/// Which log-normal centre the weight uses.
enum class SigmaForm {
  MomentConsistent,  // ln(x / (q^2 u)): reproduces the targets n! q^{2n(n+1)}
  AsPrinted,         // ln(x q^2 / u): moments n! q^{2n(n-1)}
};

/// sigma(x) = q^4 / (2 sqrt(pi delta) x) int_0^inf e^{-u} exp(-(ln(x / (s u)))^2 / (4 delta)) du, delta = ln q^2.
/// Throws DomainError for q <= 1 or x <= 0, QuadratureError if quad_tol is not reached.
double sigma_weight(double q, double x, double quad_tol = 1e-12, SigmaForm form = SigmaForm::MomentConsistent);
double log_sigma_weight(double q, double x, double quad_tol = 1e-12, SigmaForm form = SigmaForm::MomentConsistent);

struct WeightFunctionSample {
  double q;
  double delta;
  std::vector<double> xs;
  std::vector<double> sigma;
};

WeightFunctionSample sample_weight(double q, const std::vector<double>& xs, double quad_tol = 1e-12,
                                   SigmaForm form = SigmaForm::MomentConsistent);

struct MomentCheckReport {
  double q;
  std::vector<int> orders;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> rel_errors;
};

/// int_0^inf sigma(y)/q^4 y^n dy against n! q^{2n(n+1)} for n = 0..n_max (n_max <= 12).
MomentCheckReport verify_moments(double q, int n_max, double quad_tol = 1e-10,
                                 SigmaForm form = SigmaForm::MomentConsistent);

/// int_0^inf e^{-x} x^n dx against n! through the same quadrature engine (the flat-weight case).
MomentCheckReport verify_flat_weight_moments(int n_max, double quad_tol = 1e-10);

/// ln int exp(log_f(t)) dt for a concave log_f, adaptively bracketed around its peak.
/// guess and scale seed the peak search. Throws QuadratureError if quad_tol is not reached.
template <class F>
double integrate_log_concave(F&& log_f, double guess, double scale, double quad_tol);
/// As above, with log_ratio(t, t0) = log_f(t) - log_f(t0) supplied in a cancellation-free form.
template <class F, class R>
double integrate_log_concave(F&& log_f, R&& log_ratio, double guess, double scale, double quad_tol);

nlohmann::json to_json(const MomentCheckReport& r);
nlohmann::json to_json(const WeightFunctionSample& s);
nlohmann::json to_json(const HankelMinors& h);

MomentCheckReport moment_check_from_json(const nlohmann::json& j);
WeightFunctionSample weight_sample_from_json(const nlohmann::json& j);
HankelMinors hankel_minors_from_json(const nlohmann::json& j);

}  // namespace nlcs

#include "nlcs/detail/log_concave_quadrature.hpp"
