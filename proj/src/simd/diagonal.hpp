#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "nlcs/simd/kernels.hpp"

namespace nlcs::simd::detail {

// Power-of-two rescaling step for the Laguerre recurrence.
inline constexpr int kScaleBits = 600;
inline constexpr double kLogScale = 600.0 * 0.69314718055994530942;
inline constexpr double kUnderflowLog = -700.0;

// Index range of one diagonal pair m: the lower diagonal <n+m|D|n> and the
// upper diagonal <n|D|n+m>, both driven by the same recurrence in n.
struct DiagonalRange {
  bool lower;
  bool upper;
  std::size_t lower_end;  // inclusive last n
  std::size_t upper_end;
  std::size_t n_end;
};

inline DiagonalRange diagonal_range(std::size_t n_coeffs, std::size_t k_max, std::size_t m) {
  DiagonalRange r{};
  const std::size_t last = n_coeffs - 1;
  r.lower = m <= k_max;
  if (r.lower) r.lower_end = std::min(last, k_max - m);
  r.upper = m > 0 && m <= last;
  if (r.upper) r.upper_end = std::min(last - m, k_max);
  r.n_end = 0;
  if (r.lower) r.n_end = r.lower_end;
  if (r.upper) r.n_end = std::max(r.n_end, r.upper_end);
  return r;
}

// ln of the normalized Laguerre seed x^{m/2} e^{-x/2} / sqrt(m!).
inline double log_seed(double x, std::size_t m) {
  if (m == 0) return -0.5 * x;
  if (x == 0.0) return -INFINITY;
  const double dm = static_cast<double>(m);
  return 0.5 * dm * std::log(x) - 0.5 * x - 0.5 * std::lgamma(dm + 1.0);
}

// Adds the contributions of diagonal pair m to one lane of the output.
void accumulate_diagonal(const OverlapBatch& in, std::size_t lane, std::size_t m, double* out_re,
                         double* out_im);

}  // namespace nlcs::simd::detail
