#include <cmath>

#include "diagonal.hpp"
#include "eft.hpp"
#include "nlcs/simd/kernels.hpp"

namespace nlcs::simd::scalar {

std::complex<double> cdot_weighted(const double* a_re, const double* a_im, const double* b_re,
                                   const double* b_im, const double* w_hi, const double* w_lo, std::size_t n) {
  detail::DD re;
  detail::DD im;
  for (std::size_t i = 0; i < n; ++i) {
    detail::cdot_term(a_re[i], a_im[i], b_re[i], b_im[i], {w_hi[i], w_lo[i]}, re, im);
  }
  return {re.hi + re.lo, im.hi + im.lo};
}

}  // namespace nlcs::simd::scalar

namespace nlcs::simd::detail {

void accumulate_diagonal(const OverlapBatch& in, std::size_t lane, std::size_t m, double* out_re,
                         double* out_im) {
  const auto range = diagonal_range(in.n_coeffs, in.k_max, m);
  if (!range.lower && !range.upper) return;
  const double br = in.beta_re[lane];
  const double bi = in.beta_im[lane];
  const double x = br * br + bi * bi;
  const double lg0 = log_seed(x, m);
  if (std::isinf(lg0)) return;
  int scale = 0;
  if (lg0 < kUnderflowLog) scale = static_cast<int>(std::ceil((-300.0 - lg0) / kLogScale));
  const double dm = static_cast<double>(m);
  const double theta = std::atan2(bi, br);
  const double ph_re = std::cos(dm * theta);
  const double ph_im = std::sin(dm * theta);
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  const double up_re = sign * ph_re;
  const double up_im = -sign * ph_im;

  double g_prev = 0.0;
  double g = std::exp(lg0 + scale * kLogScale);
  for (std::size_t n = 0;; ++n) {
    if (scale == 0) {
      if (range.lower && n <= range.lower_end) {
        const double cr = in.c_re[n];
        const double ci = in.c_im[n];
        const std::size_t k = (n + m) * kLanes + lane;
        out_re[k] += g * (ph_re * cr - ph_im * ci);
        out_im[k] += g * (ph_re * ci + ph_im * cr);
      }
      if (range.upper && n <= range.upper_end) {
        const double cr = in.c_re[n + m];
        const double ci = in.c_im[n + m];
        const std::size_t k = n * kLanes + lane;
        out_re[k] += g * (up_re * cr - up_im * ci);
        out_im[k] += g * (up_re * ci + up_im * cr);
      }
    }
    if (n == range.n_end) break;
    const double dn = static_cast<double>(n);
    const double a = 2.0 * dn + 1.0 + dm;
    const double s1 = 1.0 / std::sqrt((dn + 1.0) * (dn + 1.0 + dm));
    const double s2 = std::sqrt(dn * (dn + dm));
    const double g_next = ((a - x) * g - s2 * g_prev) * s1;
    g_prev = g;
    g = g_next;
    if (scale > 0 && std::fabs(g) > 0x1p300) {
      g = std::ldexp(g, -kScaleBits);
      g_prev = std::ldexp(g_prev, -kScaleBits);
      --scale;
    }
  }
}

}  // namespace nlcs::simd::detail

namespace nlcs::simd::scalar {

void displaced_overlaps_lane(const OverlapBatch& in, std::size_t lane, double* out_re, double* out_im) {
  for (std::size_t k = 0; k <= in.k_max; ++k) {
    out_re[k * kLanes + lane] = 0.0;
    out_im[k * kLanes + lane] = 0.0;
  }
  if (in.n_coeffs == 0) return;
  const std::size_t m_max = std::max(in.k_max, in.n_coeffs - 1);
  for (std::size_t m = 0; m <= m_max; ++m) detail::accumulate_diagonal(in, lane, m, out_re, out_im);
}

void displaced_overlaps(const OverlapBatch& in, double* out_re, double* out_im) {
  for (std::size_t lane = 0; lane < kLanes; ++lane) displaced_overlaps_lane(in, lane, out_re, out_im);
}

}  // namespace nlcs::simd::scalar
