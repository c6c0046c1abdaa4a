#include "nlcs/identity_resolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlcs/errors.hpp"
#include "nlcs/log_complex.hpp"

namespace nlcs {
namespace {

void require_q(double q, const char* what) {
  if (!std::isfinite(q) || q < 1.0) {
    std::ostringstream os;
    os << what << " requires q >= 1, got " << q;
    throw DomainError(os.str());
  }
}

// ln of sum_{n >= 0} z^n / n! q^{-n(n+1)}.
double log_eps_series(double q, double z, double tol) {
  if (z == 0.0) return 0.0;
  const double lz = std::log(z);
  const double lq = std::log(q);
  LogSumExp acc;
  for (std::size_t n = 0;; ++n) {
    const double dn = static_cast<double>(n);
    const double term = dn * lz - std::lgamma(dn + 1.0) - dn * (dn + 1.0) * lq;
    acc.add(term);
    // Ratio of the next term to this one; once below 1 the remaining terms are a geometric tail.
    const double log_ratio = lz - std::log(dn + 1.0) - 2.0 * (dn + 1.0) * lq;
    if (log_ratio < 0.0) {
      const double tail = term + log_ratio - std::log1p(-std::exp(log_ratio));
      if (tail < std::log(tol) + acc.value()) return acc.value();
    }
  }
}

// Log-scaled determinant of a matrix given through the logs of its positive entries.
SignedLog log_det(std::vector<std::vector<double>> log_entries) {
  const std::size_t n = log_entries.size();
  double log_scale = 0.0;
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  std::vector<double> col_max(n, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const double row_max = *std::max_element(log_entries[i].begin(), log_entries[i].end());
    log_scale += row_max;
    for (std::size_t j = 0; j < n; ++j) log_entries[i][j] -= row_max;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col_max[j] = std::max(col_max[j], log_entries[i][j]);
    log_scale += col_max[j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = std::exp(log_entries[i][j] - col_max[j]);
  }
  int sign = 1;
  double log_abs = log_scale;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
    }
    if (a[piv][k] == 0.0) return {0, -std::numeric_limits<double>::infinity()};
    if (piv != k) {
      std::swap(a[piv], a[k]);
      sign = -sign;
    }
    if (a[k][k] < 0.0) sign = -sign;
    log_abs += std::log(std::fabs(a[k][k]));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return {sign, log_abs};
}

double log_moment_target(double q, int k, HankelConvention convention) {
  const double dk = k;
  const double e = 2.0 * dk * (dk + 1.0) * std::log(q);
  return std::lgamma(dk + 1.0) + (convention == HankelConvention::MomentTargets ? e : -e);
}

double log_center(double q, SigmaForm form) {
  // ln s in ln(x / (s u)).
  const double lq2 = 2.0 * std::log(q);
  return form == SigmaForm::MomentConsistent ? lq2 : -lq2;
}

void require_sigma_args(double q, double x) {
  if (!std::isfinite(q) || !(q > 1.0)) {
    std::ostringstream os;
    os << "the weight function requires q > 1, got " << q;
    throw DomainError(os.str());
  }
  if (!std::isfinite(x) || !(x > 0.0)) {
    std::ostringstream os;
    os << "the weight function requires x > 0, got " << x;
    throw DomainError(os.str());
  }
}

}  // namespace

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

double log_generalized_exp(double q, double z, double tol) {
  require_q(q, "generalized_exp");
  if (!std::isfinite(z) || z < 0.0) throw DomainError("generalized_exp requires a finite z >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("generalized_exp tolerance must be positive");
  return log_eps_series(q, z, tol);
}

double generalized_exp(double q, double z, double tol) { return std::exp(log_generalized_exp(q, z, tol)); }

DerivativeCheck generalized_exp_derivative_check(double q, double z, double h) {
  if (!(z > h && h > 0.0)) throw DomainError("derivative check requires z > h > 0");
  const double lhs = (generalized_exp(q, z + h) - generalized_exp(q, z - h)) / (2.0 * h);
  const double q2 = 1.0 / (q * q);
  return {lhs, q2 * generalized_exp(q, q2 * z)};
}

HankelMinors hankel_hadamard_minors(double q, std::size_t size, HankelConvention convention) {
  require_q(q, "hankel_hadamard_minors");
  if (size < 1 || size > 8) throw std::invalid_argument("Hankel-Hadamard size must lie in [1, 8]");
  HankelMinors out;
  for (std::size_t k = 1; k <= size; ++k) {
    for (int shift = 0; shift <= 1; ++shift) {
      std::vector<std::vector<double>> m(k, std::vector<double>(k));
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) m[i][j] = log_moment_target(q, static_cast<int>(i + j) + shift, convention);
      }
      const SignedLog d = log_det(std::move(m));
      (shift == 0 ? out.log_minors0 : out.log_minors1).push_back(d);
      (shift == 0 ? out.minors0 : out.minors1).push_back(d.value());
    }
  }
  return out;
}

double log_sigma_weight(double q, double x, double quad_tol, SigmaForm form) {
  require_sigma_args(q, x);
  const double delta = 2.0 * std::log(q);
  const double l = std::log(x) - log_center(q, form);
  // u = e^t: e^{-u} du -> e^{t - e^t} dt, times the log-normal kernel in t.
  auto log_f = [&](double t) { return t - std::exp(t) - (l - t) * (l - t) / (4.0 * delta); };
  // Differences about t0 kept small term by term, so large |l| loses no digits.
  auto log_ratio = [&](double t, double t0) {
    const double d = t - t0;
    return d - std::exp(t0) * std::expm1(d) - d * (d - 2.0 * (l - t0)) / (4.0 * delta);
  };
  const double guess = std::clamp(l, -50.0, 5.0);
  const double log_int = integrate_log_concave(log_f, log_ratio, guess, 1.0 + std::sqrt(delta), quad_tol);
  return 4.0 * std::log(q) - std::log(2.0 * std::sqrt(std::numbers::pi * delta)) - std::log(x) + log_int;
}

double sigma_weight(double q, double x, double quad_tol, SigmaForm form) {
  return std::exp(log_sigma_weight(q, x, quad_tol, form));
}

WeightFunctionSample sample_weight(double q, const std::vector<double>& xs, double quad_tol, SigmaForm form) {
  WeightFunctionSample s{q, 2.0 * std::log(q), xs, {}};
  s.sigma.reserve(xs.size());
  for (double x : xs) s.sigma.push_back(sigma_weight(q, x, quad_tol, form));
  return s;
}

MomentCheckReport verify_moments(double q, int n_max, double quad_tol, SigmaForm form) {
  if (n_max < 0 || n_max > 12) throw std::invalid_argument("moment order must lie in [0, 12]");
  require_sigma_args(q, 1.0);
  const double lq = std::log(q);
  const double delta = 2.0 * lq;
  // Inner weights are evaluated more tightly than the outer integral, down to a noise floor.
  const double inner_tol = std::max(0.01 * quad_tol, 1e-13);
  MomentCheckReport r{q, {}, {}, {}, {}};
  for (int n = 0; n <= n_max; ++n) {
    // y = e^t, so y^n dy = e^{(n+1) t} dt.
    auto log_h = [&](double t) {
      return log_sigma_weight(q, std::exp(t), inner_tol, form) - 4.0 * lq + (n + 1.0) * t;
    };
    const double guess = log_center(q, form) + std::log(n + 1.0) + 2.0 * delta * (n + 0.5);
    const double log_lhs = integrate_log_concave(log_h, guess, 1.0 + std::sqrt(2.0 * delta), quad_tol);
    const double log_rhs = std::lgamma(n + 1.0) + 2.0 * n * (n + 1.0) * lq;
    r.orders.push_back(n);
    r.lhs.push_back(std::exp(log_lhs));
    r.rhs.push_back(std::exp(log_rhs));
    r.rel_errors.push_back(std::fabs(std::expm1(log_lhs - log_rhs)));
  }
  return r;
}

MomentCheckReport verify_flat_weight_moments(int n_max, double quad_tol) {
  if (n_max < 0 || n_max > 12) throw std::invalid_argument("moment order must lie in [0, 12]");
  MomentCheckReport r{1.0, {}, {}, {}, {}};
  for (int n = 0; n <= n_max; ++n) {
    auto log_h = [&](double t) { return (n + 1.0) * t - std::exp(t); };
    const double log_lhs = integrate_log_concave(log_h, std::log(n + 1.0), 1.0, quad_tol);
    const double log_rhs = std::lgamma(n + 1.0);
    r.orders.push_back(n);
    r.lhs.push_back(std::exp(log_lhs));
    r.rhs.push_back(std::exp(log_rhs));
    r.rel_errors.push_back(std::fabs(std::expm1(log_lhs - log_rhs)));
  }
  return r;
}

nlohmann::json to_json(const MomentCheckReport& r) {
  return nlohmann::json{{"q", r.q}, {"orders", r.orders}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"rel_errors", r.rel_errors}};
}

nlohmann::json to_json(const WeightFunctionSample& s) {
  return nlohmann::json{{"q", s.q}, {"delta", s.delta}, {"xs", s.xs}, {"sigma", s.sigma}};
}

nlohmann::json to_json(const HankelMinors& h) {
  auto logs = [](const std::vector<SignedLog>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : v) a.push_back({{"sign", s.sign}, {"log_abs", s.log_abs}});
    return a;
  };
  return nlohmann::json{{"minors0", h.minors0}, {"minors1", h.minors1}, {"log_minors0", logs(h.log_minors0)},
                        {"log_minors1", logs(h.log_minors1)}};
}

MomentCheckReport moment_check_from_json(const nlohmann::json& j) {
  MomentCheckReport r;
  r.q = j.at("q").get<double>();
  r.orders = j.at("orders").get<std::vector<int>>();
  r.lhs = j.at("lhs").get<std::vector<double>>();
  r.rhs = j.at("rhs").get<std::vector<double>>();
  r.rel_errors = j.at("rel_errors").get<std::vector<double>>();
  const std::size_t n = r.orders.size();
  if (r.lhs.size() != n || r.rhs.size() != n || r.rel_errors.size() != n) {
    throw std::invalid_argument("moment report columns differ in length");
  }
  return r;
}

WeightFunctionSample weight_sample_from_json(const nlohmann::json& j) {
  WeightFunctionSample s;
  s.q = j.at("q").get<double>();
  s.delta = j.at("delta").get<double>();
  s.xs = j.at("xs").get<std::vector<double>>();
  s.sigma = j.at("sigma").get<std::vector<double>>();
  if (s.xs.size() != s.sigma.size()) throw std::invalid_argument("weight sample columns differ in length");
  return s;
}

HankelMinors hankel_minors_from_json(const nlohmann::json& j) {
  HankelMinors h;
  h.minors0 = j.at("minors0").get<std::vector<double>>();
  h.minors1 = j.at("minors1").get<std::vector<double>>();
  auto logs = [](const nlohmann::json& a) {
    std::vector<SignedLog> v;
    for (const auto& e : a) {
      const auto& la = e.at("log_abs");
      v.push_back({e.at("sign").get<int>(), la.is_null() ? -std::numeric_limits<double>::infinity() : la.get<double>()});
    }
    return v;
  };
  h.log_minors0 = logs(j.at("log_minors0"));
  h.log_minors1 = logs(j.at("log_minors1"));
  return h;
}

}  // namespace nlcs
