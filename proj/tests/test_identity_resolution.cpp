#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlcs/errors.hpp"
#include "nlcs/identity_resolution.hpp"
#include "nlcs/state.hpp"
#include "oracle_values.hpp"

using namespace nlcs;

namespace {

// Dense trapezoid rule in t = ln u over a very wide interval; exponentially
// accurate for this smooth, doubly decaying integrand.
double sigma_brute_force(double q, double x, bool as_printed) {
  const long double delta = 2.0L * std::log(static_cast<long double>(q));
  const long double s = as_printed ? 1.0L / (q * q) : static_cast<long double>(q) * q;
  const long double l = std::log(static_cast<long double>(x)) - std::log(s);
  const long double lo = -200.0L;
  const long double hi = 8.0L;
  const int steps = 400000;
  const long double h = (hi - lo) / steps;
  long double acc = 0.0L;
  for (int i = 0; i <= steps; ++i) {
    const long double t = lo + h * i;
    const long double v = std::exp(t - std::exp(t) - (l - t) * (l - t) / (4.0L * delta));
    acc += (i == 0 || i == steps) ? v / 2 : v;
  }
  acc *= h;
  const long double pref = std::pow(static_cast<long double>(q), 4) /
                           (2.0L * std::sqrt(3.14159265358979323846264338327950288L * delta) * x);
  return static_cast<double>(pref * acc);
}

}  // namespace

TEST_CASE("generalized exponential values") {
  CHECK(generalized_exp(1.0, 1.0) == doctest::Approx(std::numbers::e).epsilon(1e-15));
  CHECK(generalized_exp(1.0, 4.5) == doctest::Approx(std::exp(4.5)).epsilon(1e-14));
  for (double q : {1.0, 1.7, 4.0}) CHECK(generalized_exp(q, 0.0) == 1.0);
  CHECK(generalized_exp(2.0, 1.0) == doctest::Approx(oracle::kEps2Z1).epsilon(1e-15));
  CHECK(generalized_exp(2.0, 9.0) == doctest::Approx(oracle::kEps2Z9).epsilon(1e-14));
  CHECK(generalized_exp(1.5, 0.5) == doctest::Approx(oracle::kEps15Z05).epsilon(1e-15));
  CHECK(log_generalized_exp(1.0, 800.0) == doctest::Approx(800.0).epsilon(1e-14));
  CHECK_THROWS_AS(generalized_exp(0.5, 1.0), DomainError);
  CHECK_THROWS_AS(generalized_exp(2.0, -1.0), DomainError);
}

TEST_CASE("generalized exponential equals the q-exponential normalization") {
  for (double q : {1.0, 2.0}) {
    for (double r : {0.5, 1.0, 3.0}) {
      const auto st = build_state(Nonlinearity::q_exp(q), {r, 0.0});
      CHECK(std::exp(st.norm_log()) == doctest::Approx(generalized_exp(q, r * r)).epsilon(1e-10));
    }
  }
}

TEST_CASE("derivative identity") {
  const auto one = generalized_exp_derivative_check(1.0, 2.0, 1e-4);
  CHECK(one.lhs == doctest::Approx(std::exp(2.0)).epsilon(1e-7));
  CHECK(one.rhs == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  const auto two = generalized_exp_derivative_check(2.0, 1.0, 1e-4);
  CHECK(std::fabs(two.lhs - two.rhs) < 1e-6);
  const double h = 0.05;
  const auto a = generalized_exp_derivative_check(1.5, 0.5, h);
  const auto b = generalized_exp_derivative_check(1.5, 0.5, h / 2);
  const double ratio = std::fabs(a.lhs - a.rhs) / std::fabs(b.lhs - b.rhs);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.02));
  CHECK_THROWS_AS(generalized_exp_derivative_check(2.0, 0.1, 0.2), DomainError);
}

TEST_CASE("Hankel minors small cases") {
  const auto h = hankel_hadamard_minors(1.0, 2);
  REQUIRE(h.minors0.size() == 2);
  CHECK(h.minors0[0] == doctest::Approx(1.0));
  CHECK(h.minors0[1] == doctest::Approx(1.0));
  // h1 = [[1, 2], [2, 6]]
  CHECK(h.minors1[0] == doctest::Approx(1.0));
  CHECK(h.minors1[1] == doctest::Approx(2.0));
  const auto p = hankel_hadamard_minors(2.0, 1, HankelConvention::AsPrinted);
  CHECK(p.minors1[0] == doctest::Approx(0.0625).epsilon(1e-15));
  const auto t = hankel_hadamard_minors(2.0, 1);
  CHECK(t.minors1[0] == doctest::Approx(16.0).epsilon(1e-15));
  CHECK_THROWS_AS(hankel_hadamard_minors(2.0, 9), std::invalid_argument);
  CHECK_THROWS_AS(hankel_hadamard_minors(2.0, 0), std::invalid_argument);
}

TEST_CASE("Hankel minors are positive for the moment targets") {
  for (double q : {1.0, 1.25, 2.0, 4.0}) {
    const auto h = hankel_hadamard_minors(q, 6);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(h.log_minors0[k].sign == 1);
      CHECK(h.log_minors1[k].sign == 1);
    }
  }
  // The 2x2 closed form: det [[1, q^4], [q^4, 2 q^12]] = 2 q^12 - q^8.
  const auto h = hankel_hadamard_minors(1.25, 2);
  CHECK(h.minors0[1] == doctest::Approx(2 * std::pow(1.25, 12) - std::pow(1.25, 8)).epsilon(1e-12));
}

TEST_CASE("printed convention loses positivity") {
  // det [[1, q^-4], [q^-4, 2 q^-12]] = q^-12 (2 - q^4) < 0 for q^4 > 2.
  const auto h = hankel_hadamard_minors(2.0, 2, HankelConvention::AsPrinted);
  CHECK(h.minors0[1] == doctest::Approx(std::pow(2.0, -12) * (2 - 16)).epsilon(1e-12));
  CHECK(h.log_minors0[1].sign == -1);
}

TEST_CASE("sigma reference values") {
  CHECK(sigma_weight(2.0, 1.0) == doctest::Approx(oracle::kSigmaQ2X1).epsilon(1e-11));
  CHECK(sigma_weight(2.0, 1.0, 1e-12, SigmaForm::AsPrinted) == doctest::Approx(oracle::kSigmaQ2X1AsPrinted).epsilon(1e-11));
  CHECK(sigma_weight(5.0, 0.1) == doctest::Approx(oracle::kSigmaQ5X01).epsilon(1e-11));
  CHECK(sigma_weight(10.0, 3.0) == doctest::Approx(oracle::kSigmaQ10X3).epsilon(1e-11));
  CHECK_THROWS_AS(sigma_weight(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(sigma_weight(2.0, 0.0), DomainError);
}

TEST_CASE("sigma agrees with extreme-limit integration") {
  for (double q : {1.1, 2.0, 5.0, 10.0}) {
    for (double x : {1e-3, 0.2, 1.0, 7.0, 100.0}) {
      CHECK(sigma_weight(q, x) == doctest::Approx(sigma_brute_force(q, x, false)).epsilon(1e-9));
      CHECK(sigma_weight(q, x, 1e-12, SigmaForm::AsPrinted) ==
            doctest::Approx(sigma_brute_force(q, x, true)).epsilon(1e-9));
    }
  }
}

TEST_CASE("sigma is positive on wide log grids") {
  for (double q : {2.0, 5.0, 10.0}) {
    for (int i = 0; i < 200; ++i) {
      const double x = std::pow(10.0, -4.0 + 8.0 * i / 199.0);
      CHECK(log_sigma_weight(q, x) > -std::numeric_limits<double>::infinity());
      CHECK(sigma_weight(q, x) >= 0.0);
    }
  }
  const auto s = sample_weight(2.0, {0.5, 1.0, 2.0});
  CHECK(s.delta == doctest::Approx(2 * std::log(2.0)));
  CHECK(s.sigma.size() == 3);
  for (double v : s.sigma) CHECK(v > 0.0);
}

TEST_CASE("moment recovery") {
  for (double q : {1.1, 1.5, 2.0}) {
    const auto r = verify_moments(q, 8);
    REQUIRE(r.orders.size() == 9);
    for (std::size_t n = 0; n < r.orders.size(); ++n) {
      CHECK(r.rel_errors[n] < 1e-5);
      CHECK(r.rhs[n] > 0.0);
    }
    CHECK(r.lhs[0] == doctest::Approx(1.0).epsilon(1e-6));
  }
  const auto r = verify_moments(1.2, 3);
  CHECK(r.rhs[3] == doctest::Approx(6 * std::pow(1.2, 24)).epsilon(1e-14));
  CHECK(r.rhs[3] == doctest::Approx(476.98).epsilon(1e-4));
  CHECK(r.lhs[3] == doctest::Approx(r.rhs[3]).epsilon(1e-5));
  CHECK_THROWS_AS(verify_moments(2.0, 13), std::invalid_argument);
}

TEST_CASE("printed weight reproduces shifted moments") {
  const double q = 1.5;
  const auto r = verify_moments(q, 5, 1e-10, SigmaForm::AsPrinted);
  double fact = 1.0;
  for (int n = 0; n <= 5; ++n) {
    if (n > 0) fact *= n;
    CHECK(r.lhs[n] == doctest::Approx(fact * std::pow(q, 2.0 * n * (n - 1))).epsilon(1e-8));
  }
  CHECK(r.rel_errors[3] > 0.1);
}

TEST_CASE("flat weight") {
  const auto r = verify_flat_weight_moments(10);
  for (std::size_t n = 0; n < r.orders.size(); ++n) CHECK(r.rel_errors[n] < 1e-9);
}

TEST_CASE("log-concave quadrature") {
  // int exp(-(t - 3)^2 / 2) dt = sqrt(2 pi)
  const double v = integrate_log_concave([](double t) { return -(t - 3) * (t - 3) / 2; }, 0.0, 1.0, 1e-12);
  CHECK(v == doctest::Approx(0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-12));
  // Gamma(6) in t = ln x
  const double g = integrate_log_concave([](double t) { return 6 * t - std::exp(t); }, 0.0, 1.0, 1e-12);
  CHECK(g == doctest::Approx(std::log(120.0)).epsilon(1e-12));
}

TEST_CASE("JSON round trips") {
  const auto r = verify_moments(2.0, 3);
  const auto r2 = moment_check_from_json(nlohmann::json::parse(to_json(r).dump()));
  CHECK(r2.lhs == r.lhs);
  CHECK(r2.orders == r.orders);
  const auto s = sample_weight(5.0, {0.1, 1.0});
  const auto s2 = weight_sample_from_json(nlohmann::json::parse(to_json(s).dump()));
  CHECK(s2.sigma == s.sigma);
  CHECK(s2.q == 5.0);
  const auto h = hankel_hadamard_minors(4.0, 4, HankelConvention::AsPrinted);
  const auto h2 = hankel_minors_from_json(nlohmann::json::parse(to_json(h).dump()));
  CHECK(h2.minors0 == h.minors0);
  CHECK(h2.log_minors1.size() == h.log_minors1.size());
  for (std::size_t k = 0; k < h.log_minors1.size(); ++k) {
    CHECK(h2.log_minors1[k].sign == h.log_minors1[k].sign);
    CHECK(h2.log_minors1[k].log_abs == h.log_minors1[k].log_abs);
  }
}
