#include "nlcs/wigner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nlcs/errors.hpp"
#include "nlcs/io.hpp"
#include "nlcs/log_complex.hpp"
#include "nlcs/moments.hpp"
#include "nlcs/simd/kernels.hpp"

namespace nlcs {
namespace {

using simd::kLanes;

std::size_t initial_k(const FockVector& psi, std::complex<double> alpha) {
  const double r = std::abs(alpha) + std::sqrt(static_cast<double>(psi.size()));
  return std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(r * r)));
}

simd::OverlapBatch make_batch(const FockVector& psi, std::size_t k_max, const std::complex<double>* alphas) {
  simd::OverlapBatch b{};
  b.c_re = psi.real_parts().data();
  b.c_im = psi.imag_parts().data();
  b.n_coeffs = psi.size();
  b.k_max = k_max;
  for (std::size_t l = 0; l < kLanes; ++l) {
    b.beta_re[l] = -alphas[l].real();
    b.beta_im[l] = -alphas[l].imag();
  }
  return b;
}

struct BatchResult {
  double w[kLanes];
  std::size_t failed_lane;  // kLanes when every lane converged
};

// Parity sums for four phase-space points sharing one overlap cutoff.
BatchResult wigner_batch(const FockVector& psi, const std::complex<double>* alphas, const WignerOptions& opts) {
  std::size_t k_max = 0;
  for (std::size_t l = 0; l < kLanes; ++l) k_max = std::max(k_max, initial_k(psi, alphas[l]));
  k_max = std::min(k_max, opts.k_cap);
  const double norm = psi.norm_squared();
  std::vector<double> o_re;
  std::vector<double> o_im;
  BatchResult res{};
  for (;;) {
    o_re.assign((k_max + 1) * kLanes, 0.0);
    o_im.assign((k_max + 1) * kLanes, 0.0);
    simd::displaced_overlaps(make_batch(psi, k_max, alphas), o_re.data(), o_im.data());
    res.failed_lane = kLanes;
    for (std::size_t l = 0; l < kLanes; ++l) {
      CompensatedSum parity;
      CompensatedSum mass;
      for (std::size_t k = 0; k <= k_max; ++k) {
        const double v = o_re[k * kLanes + l] * o_re[k * kLanes + l] + o_im[k * kLanes + l] * o_im[k * kLanes + l];
        mass.add(v);
        parity.add(k % 2 == 0 ? v : -v);
      }
      res.w[l] = 2.0 / std::numbers::pi * parity.value() / norm;
      if (!((norm - mass.value()) / norm < opts.mass_tol) && res.failed_lane == kLanes) res.failed_lane = l;
    }
    if (res.failed_lane == kLanes) return res;
    if (k_max >= opts.k_cap) return res;
    k_max = std::min(opts.k_cap, 2 * k_max);
  }
}

[[noreturn]] void throw_unconverged(const std::complex<double>& alpha, const WignerOptions& opts) {
  std::ostringstream os;
  os << "Wigner overlap series did not converge at (x, p) = (" << alpha.real() << ", " << alpha.imag()
     << ") within the overlap cutoff cap " << opts.k_cap;
  throw ConvergenceError(os.str());
}

double binom(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace

void PhaseGrid::validate() const {
  if (!(x_min < x_max) || !(p_min < p_max)) throw std::invalid_argument("phase grid ranges must be increasing");
  if (n_x < 2 || n_p < 2) throw std::invalid_argument("phase grid needs at least two points per axis");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(p_min) || !std::isfinite(p_max)) {
    throw std::invalid_argument("phase grid bounds must be finite");
  }
}

std::vector<std::complex<double>> displaced_overlaps(const FockVector& psi, std::complex<double> alpha,
                                                     std::size_t k_max) {
  const std::complex<double> alphas[kLanes] = {alpha, alpha, alpha, alpha};
  std::vector<double> o_re((k_max + 1) * kLanes);
  std::vector<double> o_im((k_max + 1) * kLanes);
  simd::scalar::displaced_overlaps_lane(make_batch(psi, k_max, alphas), 0, o_re.data(), o_im.data());
  std::vector<std::complex<double>> out(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) out[k] = {o_re[k * kLanes], o_im[k * kLanes]};
  return out;
}

std::complex<double> displacement_overlap(const FockVector& psi, std::complex<double> alpha, std::size_t k) {
  return displaced_overlaps(psi, alpha, k)[k];
}

std::complex<double> displacement_overlap(const DeformedState& state, std::complex<double> alpha, std::size_t k) {
  return displacement_overlap(state.amplitudes(), alpha, k);
}

double wigner_at(const FockVector& psi, double x, double p, const WignerOptions& opts) {
  const std::complex<double> alpha(x, p);
  const std::complex<double> alphas[kLanes] = {alpha, alpha, alpha, alpha};
  const auto r = wigner_batch(psi, alphas, opts);
  if (r.failed_lane != kLanes) throw_unconverged(alpha, opts);
  return r.w[0];
}

double wigner_at(const DeformedState& state, double x, double p, const WignerOptions& opts) {
  return wigner_at(state.amplitudes(), x, p, opts);
}

double wigner_derivative_series(const FockVector& psi, double x, double p) {
  const std::complex<double> a(x, p);
  const std::complex<double> ac = std::conj(a);
  const auto n_max = static_cast<int>(psi.size());
  std::complex<double> total = 0.0;
  for (int n = 0; n < n_max; ++n) {
    for (int m = 0; m < n_max; ++m) {
      // d^n/da^n d^m/da*^m exp(-4 a a*) divided by exp(-4|a|^2).
      std::complex<double> deriv = 0.0;
      for (int k = 0; k <= std::min(n, m); ++k) {
        deriv += binom(n, k) * std::exp(std::lgamma(m + 1.0) - std::lgamma(m - k + 1.0)) * std::pow(a, m - k) *
                 std::pow(-4.0 * ac, n - k);
      }
      deriv *= std::pow(-4.0, m);
      const double scale = std::pow(-0.5, n + m) / std::sqrt(std::tgamma(n + 1.0) * std::tgamma(m + 1.0));
      total += psi[n] * std::conj(psi[m]) * scale * deriv;
    }
  }
  return 2.0 / std::numbers::pi * std::exp(-2.0 * std::norm(a)) * total.real() / psi.norm_squared();
}

WignerGrid wigner_grid(const FockVector& psi, const PhaseGrid& grid, const WignerOptions& opts) {
  grid.validate();
  WignerGrid out;
  out.grid = grid;
  const std::size_t total = grid.n_x * grid.n_p;
  out.values.assign(total, 0.0);
  const std::size_t batches = (total + kLanes - 1) / kLanes;

  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  std::size_t first_error_index = std::numeric_limits<std::size_t>::max();
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= batches) return;
      std::complex<double> alphas[kLanes];
      for (std::size_t l = 0; l < kLanes; ++l) {
        const std::size_t idx = std::min(total - 1, b * kLanes + l);
        alphas[l] = {grid.x(idx / grid.n_p), grid.p(idx % grid.n_p)};
      }
      const auto r = wigner_batch(psi, alphas, opts);
      if (r.failed_lane != kLanes) {
        const std::size_t idx = std::min(total - 1, b * kLanes + r.failed_lane);
        std::lock_guard<std::mutex> lock(err_mu);
        if (idx < first_error_index) {
          first_error_index = idx;
          try {
            throw_unconverged(alphas[r.failed_lane], opts);
          } catch (...) {
            first_error = std::current_exception();
          }
        }
        continue;
      }
      for (std::size_t l = 0; l < kLanes && b * kLanes + l < total; ++l) out.values[b * kLanes + l] = r.w[l];
    }
  };
  unsigned n_threads = opts.threads != 0 ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, batches));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  const auto it = std::min_element(out.values.begin(), out.values.end());
  const auto imin = static_cast<std::size_t>(it - out.values.begin());
  out.min_value = *it;
  out.min_x = grid.x(imin / grid.n_p);
  out.min_p = grid.p(imin % grid.n_p);
  WignerGrid neg = out;
  for (auto& v : neg.values) v = std::max(-v, 0.0);
  out.negative_volume = trapezoid_integral(neg);
  return out;
}

WignerGrid wigner_grid(const DeformedState& state, const PhaseGrid& grid, const WignerOptions& opts) {
  return wigner_grid(state.amplitudes(), grid, opts);
}

PhaseGrid auto_grid(const FockVector& psi, std::size_t points) {
  const auto ms = moment_set(psi);
  const auto qs = quadrature_squeezing(ms);
  // Variances of Re alpha and Im alpha are half the quadrature variances.
  const double sigma = std::sqrt(0.5 * std::max(qs.s_x, qs.s_p) + 0.25);
  const double half = 7.0 * sigma + 1.0;
  PhaseGrid g;
  g.x_min = ms.a[1].real() - half;
  g.x_max = ms.a[1].real() + half;
  g.p_min = ms.a[1].imag() - half;
  g.p_max = ms.a[1].imag() + half;
  g.n_x = std::max<std::size_t>(points, 2);
  g.n_p = g.n_x;
  return g;
}

PhaseGrid auto_grid(const DeformedState& state, std::size_t points) {
  return auto_grid(state.amplitudes(), points);
}

double trapezoid_integral(const WignerGrid& w) {
  const auto& g = w.grid;
  CompensatedSum s;
  for (std::size_t i = 0; i < g.n_x; ++i) {
    const double wx = (i == 0 || i + 1 == g.n_x) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < g.n_p; ++j) {
      const double wp = (j == 0 || j + 1 == g.n_p) ? 0.5 : 1.0;
      s.add(wx * wp * w.at(i, j));
    }
  }
  return s.value() * g.dx() * g.dp();
}

double trapezoid_integral_squared(const WignerGrid& w) {
  WignerGrid sq = w;
  for (auto& v : sq.values) v *= v;
  return trapezoid_integral(sq);
}

double purity_alpha_plane(const WignerGrid& w) { return std::numbers::pi * trapezoid_integral_squared(w); }

double purity_quadrature(const WignerGrid& w) {
  // dq dp_q = 2 dx dp and W_q^2 = W^2 / 4.
  return 2.0 * std::numbers::pi * (2.0 * trapezoid_integral_squared(w) / 4.0);
}

std::string wigner_csv(const WignerGrid& w) {
  io::CsvWriter csv({"x", "p", "W"});
  for (std::size_t i = 0; i < w.grid.n_x; ++i) {
    for (std::size_t j = 0; j < w.grid.n_p; ++j) csv.row_numbers({w.grid.x(i), w.grid.p(j), w.at(i, j)});
  }
  return csv.str();
}

nlohmann::json to_json(const WignerGrid& w) {
  const auto& g = w.grid;
  return nlohmann::json{
      {"grid", {{"x_min", g.x_min}, {"x_max", g.x_max}, {"p_min", g.p_min}, {"p_max", g.p_max}, {"n_x", g.n_x}, {"n_p", g.n_p}}},
      {"values", w.values},
      {"min_value", w.min_value},
      {"min_location", {w.min_x, w.min_p}},
      {"negative_volume", w.negative_volume}};
}

WignerGrid wigner_grid_from_json(const nlohmann::json& j) {
  WignerGrid w;
  const auto& g = j.at("grid");
  w.grid.x_min = g.at("x_min").get<double>();
  w.grid.x_max = g.at("x_max").get<double>();
  w.grid.p_min = g.at("p_min").get<double>();
  w.grid.p_max = g.at("p_max").get<double>();
  w.grid.n_x = g.at("n_x").get<std::size_t>();
  w.grid.n_p = g.at("n_p").get<std::size_t>();
  w.grid.validate();
  w.values = j.at("values").get<std::vector<double>>();
  if (w.values.size() != w.grid.n_x * w.grid.n_p) throw std::invalid_argument("Wigner value count does not match grid");
  w.min_value = j.at("min_value").get<double>();
  w.min_x = j.at("min_location").at(0).get<double>();
  w.min_p = j.at("min_location").at(1).get<double>();
  w.negative_volume = j.at("negative_volume").get<double>();
  return w;
}

}  // namespace nlcs
