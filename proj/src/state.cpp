#include "nlcs/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlcs/errors.hpp"

namespace nlcs {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kQuietRun = 8;

// Produces the unnormalized terms u_n in order, carrying running sums for the
// families whose deformed factorial has no closed form.
class TermGenerator {
 public:
  TermGenerator(const Nonlinearity& spec, std::complex<double> z)
      : spec_(spec), log_abs_z_(std::log(std::abs(z))), arg_z_(std::arg(z)) {}

  LogComplex next() {
    const std::size_t n = n_++;
    if (n == 0) return LogComplex::one();
    if (log_abs_z_ == kNegInf) return LogComplex::zero();
    const double x = static_cast<double>(n);
    LogComplex fact;
    switch (spec_.family()) {
      case Family::LambdaExp:
        harmonic_.add(1.0 / x);
        fact = {spec_.param() * harmonic_.value() - 0.5 * std::lgamma(x + 1.0), 0.0};
        break;
      case Family::QSinh:
        running_.add(0.5 * log_f_squared(spec_, n));
        fact = {running_.value(), 0.0};
        break;
      default:
        fact = log_f_factorial(spec_, n);
        break;
    }
    return LogComplex::polar_log(x * log_abs_z_ - 0.5 * std::lgamma(x + 1.0) - fact.log_magnitude,
                                 x * arg_z_ - fact.phase);
  }

 private:
  Nonlinearity spec_;
  double log_abs_z_;
  double arg_z_;
  std::size_t n_ = 0;
  CompensatedSum harmonic_;
  CompensatedSum running_;
};

// ln of sup_{k >= n} p_{k+1}/p_k; every supported family has a monotone ratio,
// so the sup is either the ratio at n or its limit.
double log_ratio_sup(const Nonlinearity& spec, double log_abs_z2, std::size_t n) {
  const double at_n =
      log_abs_z2 - std::log(static_cast<double>(n + 1)) - log_f_squared(spec, n + 1);
  const double limit = spec.family() == Family::LambdaExp ? log_abs_z2 : kNegInf;
  return std::max(at_n, limit);
}

double log_ratio_at(const Nonlinearity& spec, double log_abs_z2, std::size_t n) {
  return log_abs_z2 - std::log(static_cast<double>(n + 1)) - log_f_squared(spec, n + 1);
}

struct Truncation {
  bool certified;
  double tail;
};

// Discarded-mass bound when truncating at n given prefix log-sums.
Truncation check_truncation(const Nonlinearity& spec, double log_abs_z2,
                            const std::vector<double>& log_p, const std::vector<double>& prefix,
                            double max_log_p, std::size_t n, double tol) {
  const double log_r = log_ratio_sup(spec, log_abs_z2, n);
  double tail = std::numeric_limits<double>::infinity();
  if (log_r < 0.0) {
    const double r = std::exp(log_r);
    tail = std::exp(log_p[n] + log_r - std::log1p(-r) - prefix[n]);
  }
  if (log_p[n] == kNegInf) tail = 0.0;
  bool quiet = n + 1 >= kQuietRun;
  const double limit = std::log(tol) + max_log_p;
  for (std::size_t k = n + 1 - std::min(n + 1, kQuietRun); quiet && k <= n; ++k) {
    quiet = log_p[k] < limit;
  }
  return {quiet && tail <= tol, tail};
}

}  // namespace

FockVector::FockVector(std::vector<std::complex<double>> amps) : amps_(std::move(amps)) {
  re_.reserve(amps_.size());
  im_.reserve(amps_.size());
  CompensatedSum n2;
  for (const auto& c : amps_) {
    re_.push_back(c.real());
    im_.push_back(c.imag());
    n2.add(std::norm(c));
  }
  norm2_ = n2.value();
}

FockVector FockVector::number_state(std::size_t n) {
  std::vector<std::complex<double>> amps(n + 1, {0.0, 0.0});
  amps[n] = 1.0;
  return FockVector(std::move(amps));
}

std::vector<double> FockVector::probabilities() const {
  std::vector<double> p;
  p.reserve(amps_.size());
  for (const auto& c : amps_) p.push_back(std::norm(c));
  return p;
}

DeformedState::DeformedState(Nonlinearity spec, std::complex<double> z, std::vector<LogComplex> coeffs,
                             double norm_log, double tail_bound)
    : spec_(spec), z_(z), coeffs_(std::move(coeffs)), norm_log_(norm_log), tail_bound_(tail_bound) {
  if (coeffs_.empty()) throw std::invalid_argument("a state needs at least one coefficient");
}

FockVector DeformedState::amplitudes() const {
  std::vector<std::complex<double>> amps;
  amps.reserve(coeffs_.size());
  for (const auto& c : coeffs_) amps.push_back(c.to_complex());
  return FockVector(std::move(amps));
}

LogComplex unnormalized_term(const Nonlinearity& spec, std::complex<double> z, std::size_t n) {
  if (n == 0) return LogComplex::one();
  if (std::abs(z) == 0.0) return LogComplex::zero();
  const double x = static_cast<double>(n);
  const LogComplex fact = log_f_factorial(spec, n);
  return LogComplex::polar_log(x * std::log(std::abs(z)) - 0.5 * std::lgamma(x + 1.0) - fact.log_magnitude,
                               x * std::arg(z) - fact.phase);
}

DeformedState build_state(const Nonlinearity& spec, std::complex<double> z, const BuildOptions& opts) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("z must be finite");
  const double radius = domain_radius(spec);
  if (!(std::abs(z) < radius)) {
    std::ostringstream os;
    os << "|z| = " << std::abs(z) << " is outside the domain |z| < " << radius << " of " << spec.describe();
    throw DomainError(os.str());
  }
  if (!(opts.tol > 0.0 && opts.tol < 1.0)) throw std::invalid_argument("tolerance must lie in (0, 1)");

  if (std::abs(z) == 0.0 && !opts.fixed_cutoff) {
    return DeformedState(spec, z, {LogComplex::one()}, 0.0, 0.0);
  }

  const double log_abs_z2 = 2.0 * std::log(std::abs(z));
  TermGenerator gen(spec, z);
  std::vector<LogComplex> terms;
  std::vector<double> log_p;
  std::vector<double> prefix;
  LogSumExp running;
  double max_log_p = kNegInf;
  auto extend_to = [&](std::size_t n) {
    while (terms.size() <= n) {
      terms.push_back(gen.next());
      log_p.push_back(2.0 * terms.back().log_magnitude);
      running.add(log_p.back());
      prefix.push_back(running.value());
      max_log_p = std::max(max_log_p, log_p.back());
    }
  };

  std::size_t cutoff = 0;
  double tail = 0.0;
  if (opts.fixed_cutoff) {
    cutoff = *opts.fixed_cutoff;
    extend_to(cutoff);
    tail = check_truncation(spec, log_abs_z2, log_p, prefix, max_log_p, cutoff, opts.tol).tail;
  } else {
    std::size_t mode = 0;
    while (mode < opts.max_cutoff && log_ratio_at(spec, log_abs_z2, mode) > 0.0) ++mode;
    std::size_t n = std::min(opts.max_cutoff, std::max<std::size_t>(32, 4 * mode));
    for (;;) {
      extend_to(n);
      if (check_truncation(spec, log_abs_z2, log_p, prefix, max_log_p, n, opts.tol).certified) break;
      if (n >= opts.max_cutoff) {
        std::ostringstream os;
        os << "cutoff for " << spec.describe() << " at |z| = " << std::abs(z)
           << " exceeds the maximum of " << opts.max_cutoff << " at tolerance " << opts.tol;
        throw ConvergenceError(os.str());
      }
      n = std::min(opts.max_cutoff, 2 * n);
    }
    // Smallest truncation that still certifies.
    for (cutoff = 0; cutoff <= n; ++cutoff) {
      const auto t = check_truncation(spec, log_abs_z2, log_p, prefix, max_log_p, cutoff, opts.tol);
      if (t.certified) {
        tail = t.tail;
        break;
      }
    }
  }

  const double norm_log = prefix[cutoff];
  std::vector<LogComplex> coeffs;
  coeffs.reserve(cutoff + 1);
  for (std::size_t k = 0; k <= cutoff; ++k) {
    coeffs.push_back(terms[k].is_zero()
                         ? LogComplex::zero()
                         : LogComplex{terms[k].log_magnitude - 0.5 * norm_log, terms[k].phase});
  }
  return DeformedState(spec, z, std::move(coeffs), norm_log, tail);
}

DeformedState build_state(const Nonlinearity& spec, std::complex<double> z, double tol) {
  BuildOptions opts;
  opts.tol = tol;
  return build_state(spec, z, opts);
}

std::vector<double> photon_distribution(const DeformedState& state) {
  std::vector<double> p;
  p.reserve(state.coeffs().size());
  for (const auto& c : state.coeffs()) p.push_back(c.is_zero() ? 0.0 : std::exp(2.0 * c.log_magnitude));
  return p;
}

DeformedState kerr_evolve(std::complex<double> z, double t, double tol) {
  if (!std::isfinite(t)) throw DomainError("evolution time must be finite");
  return build_state(Nonlinearity::beta_imaginary(2.0 * t), z, tol);
}

void to_json(nlohmann::json& j, const Nonlinearity& spec) {
  j = nlohmann::json{{"family", std::string(family_name(spec.family()))}, {"param", spec.param()}};
}

void from_json(const nlohmann::json& j, Nonlinearity& spec) {
  spec = Nonlinearity::make(parse_family(j.at("family").get<std::string>()), j.value("param", 0.0));
}

nlohmann::json state_to_json(const DeformedState& state) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : state.coeffs()) {
    nlohmann::json lm = c.is_zero() ? nlohmann::json(nullptr) : nlohmann::json(c.log_magnitude);
    coeffs.push_back(nlohmann::json::array({lm, c.phase}));
  }
  return nlohmann::json{{"spec", state.spec()},
                        {"z", {state.z().real(), state.z().imag()}},
                        {"cutoff", state.cutoff()},
                        {"coeffs", coeffs},
                        {"norm_log", state.norm_log()},
                        {"tail_bound", state.tail_bound()}};
}

DeformedState state_from_json(const nlohmann::json& j) {
  const auto& sj = j.at("spec");
  const auto spec = Nonlinearity::make(parse_family(sj.at("family").get<std::string>()), sj.value("param", 0.0));
  const auto& zj = j.at("z");
  const std::complex<double> z(zj.at(0).get<double>(), zj.at(1).get<double>());
  std::vector<LogComplex> coeffs;
  for (const auto& c : j.at("coeffs")) {
    if (c.at(0).is_null()) {
      coeffs.push_back(LogComplex::zero());
    } else {
      coeffs.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    }
  }
  if (coeffs.size() != j.at("cutoff").get<std::size_t>() + 1) {
    throw std::invalid_argument("coefficient count does not match cutoff");
  }
  return DeformedState(spec, z, std::move(coeffs), j.at("norm_log").get<double>(),
                       j.at("tail_bound").get<double>());
}

}  // namespace nlcs
