#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "nlcs/simd/kernels.hpp"

namespace nlcs::simd {

namespace {

// -1 means automatic selection.
std::atomic<int> g_override{-1};

bool cpu_has_avx2() {
#if defined(NLCS_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  const char* env = std::getenv("NLCS_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return Backend::Scalar;
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

std::string_view backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool backend_available(Backend b) {
  if (b == Backend::Scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

Backend active_backend() {
  const int o = g_override.load(std::memory_order_relaxed);
  if (o >= 0) return static_cast<Backend>(o);
  static const Backend detected = detect();
  return detected;
}

void set_backend_override(std::optional<Backend> b) {
  if (b && !backend_available(*b)) {
    throw std::invalid_argument("SIMD backend " + std::string(backend_name(*b)) + " is not available");
  }
  g_override.store(b ? static_cast<int>(*b) : -1, std::memory_order_relaxed);
}

std::complex<double> cdot_weighted(const double* a_re, const double* a_im, const double* b_re,
                                   const double* b_im, const double* w_hi, const double* w_lo, std::size_t n) {
#if defined(NLCS_BUILD_AVX2)
  if (active_backend() == Backend::Avx2) return avx2::cdot_weighted(a_re, a_im, b_re, b_im, w_hi, w_lo, n);
#endif
  return scalar::cdot_weighted(a_re, a_im, b_re, b_im, w_hi, w_lo, n);
}

void displaced_overlaps(const OverlapBatch& in, double* out_re, double* out_im) {
#if defined(NLCS_BUILD_AVX2)
  if (active_backend() == Backend::Avx2) {
    avx2::displaced_overlaps(in, out_re, out_im);
    return;
  }
#endif
  scalar::displaced_overlaps(in, out_re, out_im);
}

}  // namespace nlcs::simd
