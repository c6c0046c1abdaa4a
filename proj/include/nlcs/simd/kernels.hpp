#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>

namespace nlcs::simd {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);

/// Whether the running CPU and this build both support the backend.
bool backend_available(Backend b);

/// Backend used by the dispatching entry points. Honours NLCS_SIMD=scalar.
Backend active_backend();

/// Pins the dispatch choice (nullopt restores automatic selection).
/// Throws std::invalid_argument for a backend that is not available.
void set_backend_override(std::optional<Backend> b);

inline constexpr std::size_t kLanes = 4;

/// Inputs shared by the four lanes of a displaced-overlap batch.
struct OverlapBatch {
  const double* c_re;  // amplitudes c_0..c_{n_coeffs-1}
  const double* c_im;
  std::size_t n_coeffs;
  std::size_t k_max;              // overlaps o_0..o_{k_max} are produced
  double beta_re[kLanes];         // displacement per lane
  double beta_im[kLanes];
};

/// sum_i conj(a_i) * b_i * w_i over split real/imaginary arrays, with w_i = w_hi[i] + w_lo[i].
/// Products and the running sum are carried in double-double, so cancelling sums stay accurate.
std::complex<double> cdot_weighted(const double* a_re, const double* a_im, const double* b_re,
                                   const double* b_im, const double* w_hi, const double* w_lo, std::size_t n);

/// o_k = <k| D(beta_lane) |psi> for k = 0..k_max, written interleaved as
/// out_re[k * kLanes + lane]. Output arrays need (k_max + 1) * kLanes entries.
void displaced_overlaps(const OverlapBatch& in, double* out_re, double* out_im);

namespace scalar {
std::complex<double> cdot_weighted(const double* a_re, const double* a_im, const double* b_re,
                                   const double* b_im, const double* w_hi, const double* w_lo, std::size_t n);
void displaced_overlaps(const OverlapBatch& in, double* out_re, double* out_im);
/// One lane of displaced_overlaps; the vector kernels fall back to it.
void displaced_overlaps_lane(const OverlapBatch& in, std::size_t lane, double* out_re, double* out_im);
}  // namespace scalar

#if defined(NLCS_BUILD_AVX2)
namespace avx2 {
std::complex<double> cdot_weighted(const double* a_re, const double* a_im, const double* b_re,
                                   const double* b_im, const double* w_hi, const double* w_lo, std::size_t n);
void displaced_overlaps(const OverlapBatch& in, double* out_re, double* out_im);
}  // namespace avx2
#endif

}  // namespace nlcs::simd
