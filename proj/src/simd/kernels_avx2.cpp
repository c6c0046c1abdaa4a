#include <immintrin.h>

#include <cmath>

#include "diagonal.hpp"
#include "eft.hpp"
#include "nlcs/simd/kernels.hpp"

namespace nlcs::simd::avx2 {

namespace {

struct VDD {
  __m256d hi;
  __m256d lo;
};

VDD vtwo_sum(__m256d a, __m256d b) {
  const __m256d s = _mm256_add_pd(a, b);
  const __m256d bb = _mm256_sub_pd(s, a);
  const __m256d e = _mm256_add_pd(_mm256_sub_pd(a, _mm256_sub_pd(s, bb)), _mm256_sub_pd(b, bb));
  return {s, e};
}

VDD vtwo_prod(__m256d a, __m256d b) {
  const __m256d p = _mm256_mul_pd(a, b);
  return {p, _mm256_fmsub_pd(a, b, p)};
}

VDD vfast_two_sum(__m256d a, __m256d b) {
  const __m256d s = _mm256_add_pd(a, b);
  return {s, _mm256_sub_pd(b, _mm256_sub_pd(s, a))};
}

VDD vdd_mul(VDD x, VDD w) {
  const VDD p = vtwo_prod(x.hi, w.hi);
  const __m256d cross = _mm256_fmadd_pd(x.hi, w.lo, _mm256_mul_pd(x.lo, w.hi));
  return vfast_two_sum(p.hi, _mm256_add_pd(p.lo, cross));
}

VDD vdd_add(VDD a, VDD b) {
  const VDD s = vtwo_sum(a.hi, b.hi);
  return vfast_two_sum(s.hi, _mm256_add_pd(s.lo, _mm256_add_pd(a.lo, b.lo)));
}

}  // namespace

std::complex<double> cdot_weighted(const double* a_re, const double* a_im, const double* b_re,
                                   const double* b_im, const double* w_hi, const double* w_lo, std::size_t n) {
  VDD re{_mm256_setzero_pd(), _mm256_setzero_pd()};
  VDD im{_mm256_setzero_pd(), _mm256_setzero_pd()};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ar = _mm256_loadu_pd(a_re + i);
    const __m256d ai = _mm256_loadu_pd(a_im + i);
    const __m256d br = _mm256_loadu_pd(b_re + i);
    const __m256d bi = _mm256_loadu_pd(b_im + i);
    const VDD w{_mm256_loadu_pd(w_hi + i), _mm256_loadu_pd(w_lo + i)};
    const VDD p1 = vtwo_prod(ar, br);
    const VDD p2 = vtwo_prod(ai, bi);
    const VDD p3 = vtwo_prod(ar, bi);
    const VDD p4 = vtwo_prod(ai, br);
    VDD t = vtwo_sum(p1.hi, p2.hi);
    t.lo = _mm256_add_pd(t.lo, _mm256_add_pd(p1.lo, p2.lo));
    re = vdd_add(re, vdd_mul(t, w));
    VDD u = vtwo_sum(p3.hi, _mm256_sub_pd(_mm256_setzero_pd(), p4.hi));
    u.lo = _mm256_add_pd(u.lo, _mm256_sub_pd(p3.lo, p4.lo));
    im = vdd_add(im, vdd_mul(u, w));
  }
  alignas(32) double rh[4], rl[4], ih[4], il[4];
  _mm256_store_pd(rh, re.hi);
  _mm256_store_pd(rl, re.lo);
  _mm256_store_pd(ih, im.hi);
  _mm256_store_pd(il, im.lo);
  detail::DD sre;
  detail::DD sim;
  for (int l = 0; l < 4; ++l) {
    sre = detail::dd_add(sre, {rh[l], rl[l]});
    sim = detail::dd_add(sim, {ih[l], il[l]});
  }
  for (; i < n; ++i) detail::cdot_term(a_re[i], a_im[i], b_re[i], b_im[i], {w_hi[i], w_lo[i]}, sre, sim);
  return {sre.hi + sre.lo, sim.hi + sim.lo};
}

void displaced_overlaps(const OverlapBatch& in, double* out_re, double* out_im) {
  using namespace detail;
  const std::size_t total = (in.k_max + 1) * kLanes;
  for (std::size_t k = 0; k < total; ++k) {
    out_re[k] = 0.0;
    out_im[k] = 0.0;
  }
  if (in.n_coeffs == 0) return;

  double xs[kLanes];
  double thetas[kLanes];
  for (std::size_t l = 0; l < kLanes; ++l) {
    xs[l] = in.beta_re[l] * in.beta_re[l] + in.beta_im[l] * in.beta_im[l];
    thetas[l] = std::atan2(in.beta_im[l], in.beta_re[l]);
  }
  const __m256d xv = _mm256_loadu_pd(xs);

  const std::size_t m_max = std::max(in.k_max, in.n_coeffs - 1);
  for (std::size_t m = 0; m <= m_max; ++m) {
    const auto range = diagonal_range(in.n_coeffs, in.k_max, m);
    if (!range.lower && !range.upper) continue;

    double seeds[kLanes];
    bool needs_scaling = false;
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double lg0 = log_seed(xs[l], m);
      needs_scaling = needs_scaling || (!std::isinf(lg0) && lg0 < kUnderflowLog);
      seeds[l] = std::exp(lg0);
    }
    if (needs_scaling) {
      for (std::size_t l = 0; l < kLanes; ++l) accumulate_diagonal(in, l, m, out_re, out_im);
      continue;
    }

    const double dm = static_cast<double>(m);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    double pr[kLanes];
    double pi[kLanes];
    for (std::size_t l = 0; l < kLanes; ++l) {
      pr[l] = std::cos(dm * thetas[l]);
      pi[l] = std::sin(dm * thetas[l]);
    }
    const __m256d ph_re = _mm256_loadu_pd(pr);
    const __m256d ph_im = _mm256_loadu_pd(pi);
    const __m256d up_re = _mm256_mul_pd(_mm256_set1_pd(sign), ph_re);
    const __m256d up_im = _mm256_mul_pd(_mm256_set1_pd(-sign), ph_im);

    __m256d g_prev = _mm256_setzero_pd();
    __m256d g = _mm256_loadu_pd(seeds);
    for (std::size_t n = 0;; ++n) {
      if (range.lower && n <= range.lower_end) {
        const __m256d cr = _mm256_set1_pd(in.c_re[n]);
        const __m256d ci = _mm256_set1_pd(in.c_im[n]);
        const __m256d t_re = _mm256_fmsub_pd(ph_re, cr, _mm256_mul_pd(ph_im, ci));
        const __m256d t_im = _mm256_fmadd_pd(ph_re, ci, _mm256_mul_pd(ph_im, cr));
        double* ore = out_re + (n + m) * kLanes;
        double* oim = out_im + (n + m) * kLanes;
        _mm256_storeu_pd(ore, _mm256_fmadd_pd(g, t_re, _mm256_loadu_pd(ore)));
        _mm256_storeu_pd(oim, _mm256_fmadd_pd(g, t_im, _mm256_loadu_pd(oim)));
      }
      if (range.upper && n <= range.upper_end) {
        const __m256d cr = _mm256_set1_pd(in.c_re[n + m]);
        const __m256d ci = _mm256_set1_pd(in.c_im[n + m]);
        const __m256d t_re = _mm256_fmsub_pd(up_re, cr, _mm256_mul_pd(up_im, ci));
        const __m256d t_im = _mm256_fmadd_pd(up_re, ci, _mm256_mul_pd(up_im, cr));
        double* ore = out_re + n * kLanes;
        double* oim = out_im + n * kLanes;
        _mm256_storeu_pd(ore, _mm256_fmadd_pd(g, t_re, _mm256_loadu_pd(ore)));
        _mm256_storeu_pd(oim, _mm256_fmadd_pd(g, t_im, _mm256_loadu_pd(oim)));
      }
      if (n == range.n_end) break;
      const double dn = static_cast<double>(n);
      const __m256d a = _mm256_sub_pd(_mm256_set1_pd(2.0 * dn + 1.0 + dm), xv);
      const __m256d s1 = _mm256_set1_pd(1.0 / std::sqrt((dn + 1.0) * (dn + 1.0 + dm)));
      const __m256d s2 = _mm256_set1_pd(std::sqrt(dn * (dn + dm)));
      const __m256d g_next = _mm256_mul_pd(_mm256_fmsub_pd(a, g, _mm256_mul_pd(s2, g_prev)), s1);
      g_prev = g;
      g = g_next;
    }
  }
}

}  // namespace nlcs::simd::avx2
