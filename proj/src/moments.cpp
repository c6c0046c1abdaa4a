#include "nlcs/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nlcs/log_complex.hpp"
#include "nlcs/simd/kernels.hpp"

namespace nlcs {
namespace {

struct DoubleDouble {
  double hi;
  double lo;
};

DoubleDouble mul_exact_int(DoubleDouble x, double m) {
  const double p = x.hi * m;
  const double e = std::fma(x.hi, m, -p) + x.lo * m;
  const double s = p + e;
  return {s, e - (s - p)};
}

// sqrt(n!/(n-k)! * (n-k+j)!/(n-k)!) style weights to double-double accuracy.
DoubleDouble weight(std::size_t i, int j, int k) {
  DoubleDouble f{1.0, 0.0};
  for (int r = 1; r <= k; ++r) f = mul_exact_int(f, static_cast<double>(i + r));
  for (int r = 1; r <= j; ++r) f = mul_exact_int(f, static_cast<double>(i + r));
  const double s = std::sqrt(f.hi);
  const double sq = s * s;
  const double corr = ((f.hi - sq) - std::fma(s, s, -sq) + f.lo) / (2.0 * s);
  const double w = s + corr;
  return {w, corr - (w - s)};
}

double det3(double a, double b, double c, double d, double e, double f, double g, double h, double i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

// Hankel determinant of (1, s1, s2, s3, s4).
double hankel3(const std::array<double, 5>& s) {
  return det3(1.0, s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
}

}  // namespace

std::complex<double> ladder_moment(const FockVector& psi, int j, int k) {
  if (j < 0 || k < 0 || j > kMaxLadderOrder || k > kMaxLadderOrder) {
    throw std::invalid_argument("ladder moment orders must lie in [0, 8]");
  }
  const std::size_t size = psi.size();
  const std::size_t off = static_cast<std::size_t>(std::max(j, k));
  if (size == 0 || psi.norm_squared() == 0.0) throw std::invalid_argument("moments of a zero vector");
  if (off >= size) return {0.0, 0.0};
  const std::size_t len = size - off;
  std::vector<double> w_hi(len);
  std::vector<double> w_lo(len);
  for (std::size_t i = 0; i < len; ++i) {
    const auto w = weight(i, j, k);
    w_hi[i] = w.hi;
    w_lo[i] = w.lo;
  }
  const auto& re = psi.real_parts();
  const auto& im = psi.imag_parts();
  const auto uj = static_cast<std::size_t>(j);
  const auto uk = static_cast<std::size_t>(k);
  return simd::cdot_weighted(re.data() + uj, im.data() + uj, re.data() + uk, im.data() + uk, w_hi.data(),
                             w_lo.data(), len) /
         psi.norm_squared();
}

std::complex<double> ladder_moment(const DeformedState& state, int j, int k) {
  return ladder_moment(state.amplitudes(), j, k);
}

MomentSet moment_set(const FockVector& psi) {
  MomentSet ms;
  ms.a[0] = 1.0;
  ms.m[0] = 1.0;
  for (int k = 1; k <= 4; ++k) {
    ms.a[k] = ladder_moment(psi, 0, k);
    ms.m[k] = ladder_moment(psi, k, k).real();
  }
  const auto p = psi.probabilities();
  const double norm = psi.norm_squared();
  std::array<CompensatedSum, 5> raw;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double x = static_cast<double>(n);
    double pw = p[n] / norm;
    for (int jj = 1; jj <= 4; ++jj) {
      pw *= x;
      raw[jj].add(pw);
    }
  }
  ms.mu[0] = 1.0;
  for (int jj = 1; jj <= 4; ++jj) ms.mu[jj] = raw[jj].value();
  // The first factorial and raw moments are the same sum.
  ms.m[1] = ms.mu[1];

  const double c = ms.mu[1];
  std::array<CompensatedSum, 5> cen;
  std::array<CompensatedSum, 5> sh;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double x = static_cast<double>(n);
    const double w = p[n] / norm;
    double pw = w;
    for (int jj = 1; jj <= 4; ++jj) {
      pw *= x - c;
      cen[jj].add(pw);
    }
    // Charlier recurrence T_{k+1} = (n - c - k) T_k - c k T_{k-1}.
    double t_prev = 1.0;
    double t = x - c;
    sh[1].add(w * t);
    for (int kk = 1; kk < 4; ++kk) {
      const double t_next = (x - c - kk) * t - c * kk * t_prev;
      t_prev = t;
      t = t_next;
      sh[kk + 1].add(w * t);
    }
  }
  ms.central[0] = 1.0;
  ms.shifted[0] = 1.0;
  for (int jj = 1; jj <= 4; ++jj) {
    ms.central[jj] = cen[jj].value();
    ms.shifted[jj] = sh[jj].value();
  }
  return ms;
}

MomentSet moment_set(const DeformedState& state) { return moment_set(state.amplitudes()); }

QuadratureSqueezing quadrature_squeezing(const MomentSet& ms) {
  const double re1 = ms.a[1].real();
  const double im1 = ms.a[1].imag();
  const double re2 = ms.a[2].real();
  return {re2 + ms.m[1] - 2.0 * re1 * re1, -re2 + ms.m[1] - 2.0 * im1 * im1};
}

AmplitudeSquaredSqueezing amplitude_squared_squeezing(const MomentSet& ms) {
  const std::complex<double> a4 = ms.a[4];
  const std::complex<double> a2 = ms.a[2];
  const std::complex<double> ad2 = std::conj(a2);
  const std::complex<double> ad4 = std::conj(a4);
  const double normal = ms.m[2];
  const double anti = ms.m[2] + 4.0 * ms.m[1] + 2.0;
  const std::complex<double> ix =
      0.25 * (a4 + ad4 + normal + anti - a2 * a2 - ad2 * ad2 - 2.0 * a2 * ad2) - ms.m[1] - 0.5;
  const std::complex<double> iy =
      0.25 * (-a4 - ad4 + normal + anti + a2 * a2 + ad2 * ad2 - 2.0 * a2 * ad2) - ms.m[1] - 0.5;
  return {ix.real(), iy.real()};
}

AmplitudeSquaredSqueezing amplitude_squared_squeezing_simplified(const MomentSet& ms) {
  const double re2 = ms.a[2].real();
  const double im2 = ms.a[2].imag();
  return {0.5 * ms.a[4].real() + 0.5 * ms.m[2] - re2 * re2, -0.5 * ms.a[4].real() + 0.5 * ms.m[2] - im2 * im2};
}

std::optional<double> mandel_q(const MomentSet& ms) {
  if (ms.mu[1] == 0.0) return std::nullopt;
  return ms.central[2] / ms.mu[1] - 1.0;
}

std::optional<double> g2_zero(const MomentSet& ms) {
  if (ms.m[1] == 0.0) return std::nullopt;
  return ms.m[2] / (ms.m[1] * ms.m[1]);
}

HankelPair hankel_determinants(const MomentSet& ms) {
  return {hankel3(ms.shifted), hankel3(ms.central)};
}

std::optional<double> a3_parameter(const MomentSet& ms) {
  const auto h = hankel_determinants(ms);
  const double den = h.det_mu - h.det_m;
  if (ms.mu[1] == 0.0) return 0.0;  // vacuum: both determinants vanish identically
  if (!(std::fabs(den) >= 1e-300)) return std::nullopt;
  return h.det_m / den;
}

CriteriaReport criteria_report(const MomentSet& ms) {
  CriteriaReport r;
  const auto qs = quadrature_squeezing(ms);
  const auto as = amplitude_squared_squeezing(ms);
  r.s_x = qs.s_x;
  r.s_p = qs.s_p;
  r.i_x = as.i_x;
  r.i_y = as.i_y;
  r.q_mandel = mandel_q(ms);
  r.g2 = g2_zero(ms);
  r.a3 = a3_parameter(ms);
  r.mean_n = ms.mu[1];
  return r;
}

CriteriaReport criteria_report(const FockVector& psi) { return criteria_report(moment_set(psi)); }
CriteriaReport criteria_report(const DeformedState& state) { return criteria_report(moment_set(state)); }

nlohmann::json to_json(const CriteriaReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return nlohmann::json{{"s_x", r.s_x}, {"s_p", r.s_p},       {"i_x", r.i_x}, {"i_y", r.i_y},
                        {"q", opt(r.q_mandel)}, {"g2", opt(r.g2)}, {"a3", opt(r.a3)}, {"mean_n", r.mean_n}};
}

}  // namespace nlcs
