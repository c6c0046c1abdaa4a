#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlcs/state.hpp"

namespace nlcs {

/// Uniform grid over alpha = x + i p, endpoints included.
struct PhaseGrid {
  double x_min = -3.0;
  double x_max = 3.0;
  double p_min = -3.0;
  double p_max = 3.0;
  std::size_t n_x = 61;
  std::size_t n_p = 61;

  /// Throws std::invalid_argument on empty ranges or fewer than two points per axis.
  void validate() const;
  [[nodiscard]] double dx() const { return (x_max - x_min) / static_cast<double>(n_x - 1); }
  [[nodiscard]] double dp() const { return (p_max - p_min) / static_cast<double>(n_p - 1); }
  [[nodiscard]] double x(std::size_t i) const { return x_min + dx() * static_cast<double>(i); }
  [[nodiscard]] double p(std::size_t j) const { return p_min + dp() * static_cast<double>(j); }
};

struct WignerOptions {
  /// Stop growing the overlap cutoff once the missing overlap mass is below this.
  double mass_tol = 1e-10;
  std::size_t k_cap = std::size_t{1} << 22;
  /// Worker threads for grids; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// <k| D(-alpha) |psi> for k = 0..k_max.
std::vector<std::complex<double>> displaced_overlaps(const FockVector& psi, std::complex<double> alpha,
                                                     std::size_t k_max);
std::complex<double> displacement_overlap(const FockVector& psi, std::complex<double> alpha, std::size_t k);
std::complex<double> displacement_overlap(const DeformedState& state, std::complex<double> alpha, std::size_t k);

/// W(x + i p) = (2/pi) sum_k (-1)^k |<k|D(-alpha)|psi>|^2, normalized by |psi|^2.
double wigner_at(const FockVector& psi, double x, double p, const WignerOptions& opts = {});
double wigner_at(const DeformedState& state, double x, double p, const WignerOptions& opts = {});

/// Wigner values from the mixed-derivative double sum of exp(-4|alpha|^2).
/// Only usable for small cutoffs; serves as an independent check of wigner_at.
double wigner_derivative_series(const FockVector& psi, double x, double p);

struct WignerGrid {
  PhaseGrid grid;
  std::vector<double> values;  // values[i * n_p + j] at (x(i), p(j))
  double min_value = 0.0;
  double min_x = 0.0;
  double min_p = 0.0;
  double negative_volume = 0.0;

  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * grid.n_p + j]; }
};

/// Throws ConvergenceError naming the grid point whose overlap series did not converge.
WignerGrid wigner_grid(const FockVector& psi, const PhaseGrid& grid, const WignerOptions& opts = {});
WignerGrid wigner_grid(const DeformedState& state, const PhaseGrid& grid, const WignerOptions& opts = {});

/// Square grid centred on <a>, wide enough to hold the state's quasi-probability mass.
PhaseGrid auto_grid(const FockVector& psi, std::size_t points = 121);
PhaseGrid auto_grid(const DeformedState& state, std::size_t points = 121);

/// Trapezoid integral of W over the grid in dx dp.
double trapezoid_integral(const WignerGrid& w);
/// Trapezoid integral of W^2 over the grid in dx dp.
double trapezoid_integral_squared(const WignerGrid& w);
/// pi * int W^2 dx dp; equal to 1 for pure states.
double purity_alpha_plane(const WignerGrid& w);
/// 2 pi * int W_q^2 dq dp with q = sqrt 2 x, p_q = sqrt 2 p and W_q = W / 2.
double purity_quadrature(const WignerGrid& w);

/// CSV with header "x,p,W" and one row per grid point.
std::string wigner_csv(const WignerGrid& w);
nlohmann::json to_json(const WignerGrid& w);
WignerGrid wigner_grid_from_json(const nlohmann::json& j);

}  // namespace nlcs
