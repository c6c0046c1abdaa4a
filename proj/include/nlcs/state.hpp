#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "nlcs/log_complex.hpp"
#include "nlcs/nonlinearity.hpp"

namespace nlcs {

inline constexpr std::size_t kDefaultMaxCutoff = 2'000'000;

/// Truncated Fock-basis amplitudes c_0..c_N in plain complex form.
///
/// This is the representation every moment and phase-space routine consumes;
/// coherent states produce one through DeformedState::amplitudes(), tests and
/// reference checks can hand one in directly (number states, superpositions).
class FockVector {
 public:
  FockVector() = default;
  explicit FockVector(std::vector<std::complex<double>> amps);

  static FockVector number_state(std::size_t n);

  [[nodiscard]] std::size_t size() const { return amps_.size(); }
  [[nodiscard]] std::size_t cutoff() const { return amps_.empty() ? 0 : amps_.size() - 1; }
  [[nodiscard]] const std::vector<std::complex<double>>& amplitudes() const { return amps_; }
  [[nodiscard]] const std::vector<double>& real_parts() const { return re_; }
  [[nodiscard]] const std::vector<double>& imag_parts() const { return im_; }
  [[nodiscard]] std::complex<double> operator[](std::size_t n) const { return amps_[n]; }
  /// sum |c_n|^2
  [[nodiscard]] double norm_squared() const { return norm2_; }
  [[nodiscard]] std::vector<double> probabilities() const;

 private:
  std::vector<std::complex<double>> amps_;
  std::vector<double> re_;
  std::vector<double> im_;
  double norm2_ = 0.0;
};

struct BuildOptions {
  double tol = 1e-12;
  std::size_t max_cutoff = kDefaultMaxCutoff;
  /// Skip the adaptive rule and truncate at exactly this index.
  std::optional<std::size_t> fixed_cutoff;
};

/// Normalized truncated expansion of the nonlinear coherent state |z, f>.
class DeformedState {
 public:
  DeformedState(Nonlinearity spec, std::complex<double> z, std::vector<LogComplex> coeffs,
                double norm_log, double tail_bound);

  [[nodiscard]] const Nonlinearity& spec() const { return spec_; }
  [[nodiscard]] std::complex<double> z() const { return z_; }
  [[nodiscard]] std::size_t cutoff() const { return coeffs_.size() - 1; }
  [[nodiscard]] const std::vector<LogComplex>& coeffs() const { return coeffs_; }
  /// ln of the normalization sum N_f(|z|^2) over the retained terms.
  [[nodiscard]] double norm_log() const { return norm_log_; }
  /// Certified upper bound on the discarded probability mass.
  [[nodiscard]] double tail_bound() const { return tail_bound_; }

  [[nodiscard]] FockVector amplitudes() const;

 private:
  Nonlinearity spec_;
  std::complex<double> z_;
  std::vector<LogComplex> coeffs_;
  double norm_log_;
  double tail_bound_;
};

/// Builds |z, f> with an adaptive cutoff so the discarded mass is below opts.tol.
/// Throws DomainError if |z| >= domain_radius(spec), ConvergenceError past opts.max_cutoff.
DeformedState build_state(const Nonlinearity& spec, std::complex<double> z, const BuildOptions& opts);
DeformedState build_state(const Nonlinearity& spec, std::complex<double> z, double tol = 1e-12);

/// P(n) = |c_n|^2 for n = 0..cutoff.
std::vector<double> photon_distribution(const DeformedState& state);

/// Canonical coherent state passed through the Kerr medium exp(-i t (n^2 + n)).
DeformedState kerr_evolve(std::complex<double> z, double t, double tol = 1e-12);

/// Unnormalized ln|u_n| and phase for term n of the expansion (no truncation logic).
LogComplex unnormalized_term(const Nonlinearity& spec, std::complex<double> z, std::size_t n);

void to_json(nlohmann::json& j, const Nonlinearity& spec);
void from_json(const nlohmann::json& j, Nonlinearity& spec);
nlohmann::json state_to_json(const DeformedState& state);
DeformedState state_from_json(const nlohmann::json& j);

}  // namespace nlcs
