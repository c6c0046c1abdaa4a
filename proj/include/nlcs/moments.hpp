#pragma once

#include <array>
#include <complex>
#include <optional>

#include <json.hpp>

#include "nlcs/state.hpp"

namespace nlcs {

/// Low-order moments of one state, shared by every criterion.
///
/// Index 0 of each array is the trivial moment (1 for a, m, mu and central).
/// central holds <(n - mean)^j>; shifted holds the factorial moments taken
/// about the mean, sum_n T_j(n; mean) P(n), with T the Charlier polynomials.
/// Both feed the Hankel determinants without the cancellation of raw moments.
struct MomentSet {
  std::array<std::complex<double>, 5> a{};  // <a^k>
  std::array<double, 5> m{};                // <a^dagger^j a^j>
  std::array<double, 5> mu{};               // <(a^dagger a)^j>
  std::array<double, 5> central{};
  std::array<double, 5> shifted{};
};

inline constexpr int kMaxLadderOrder = 8;

/// <a^dagger^j a^k>, normalized by the vector's squared norm. Requires 0 <= j, k <= 8.
std::complex<double> ladder_moment(const FockVector& psi, int j, int k);
std::complex<double> ladder_moment(const DeformedState& state, int j, int k);

MomentSet moment_set(const FockVector& psi);
MomentSet moment_set(const DeformedState& state);

struct QuadratureSqueezing {
  double s_x;
  double s_p;
};

struct AmplitudeSquaredSqueezing {
  double i_x;
  double i_y;
};

/// (Delta x)^2 - 1/2 and (Delta p)^2 - 1/2 with x = (a + a^dagger)/sqrt 2.
QuadratureSqueezing quadrature_squeezing(const MomentSet& ms);

/// I_X, I_Y from the full expression in a^4, a^dagger^2 a^2, a^2 a^dagger^2 and a^2.
AmplitudeSquaredSqueezing amplitude_squared_squeezing(const MomentSet& ms);
/// The same quantities after normal ordering and cancellation.
AmplitudeSquaredSqueezing amplitude_squared_squeezing_simplified(const MomentSet& ms);

/// Var(n)/<n> - 1; nullopt when <n> = 0.
std::optional<double> mandel_q(const MomentSet& ms);
/// m_2 / m_1^2; nullopt when m_1 = 0.
std::optional<double> g2_zero(const MomentSet& ms);
/// det m3 / (det mu3 - det m3); nullopt when the denominator is below 1e-300 in magnitude.
std::optional<double> a3_parameter(const MomentSet& ms);

/// Hankel determinants det m3 and det mu3, each evaluated shift-invariantly.
struct HankelPair {
  double det_m;
  double det_mu;
};
HankelPair hankel_determinants(const MomentSet& ms);

struct CriteriaReport {
  double s_x = 0.0;
  double s_p = 0.0;
  double i_x = 0.0;
  double i_y = 0.0;
  std::optional<double> q_mandel;
  std::optional<double> g2;
  std::optional<double> a3;
  double mean_n = 0.0;

  /// g2 for plots and tables: the vacuum is shown as 0 rather than undefined.
  [[nodiscard]] double g2_display() const { return g2.value_or(0.0); }
};

CriteriaReport criteria_report(const MomentSet& ms);
CriteriaReport criteria_report(const FockVector& psi);
CriteriaReport criteria_report(const DeformedState& state);

/// {"s_x","s_p","i_x","i_y","q","g2","a3","mean_n"} with null for undefined values.
nlohmann::json to_json(const CriteriaReport& r);

}  // namespace nlcs
