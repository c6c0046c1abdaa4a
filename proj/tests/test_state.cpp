#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "nlcs/errors.hpp"
#include "nlcs/state.hpp"
#include "oracle_values.hpp"

using namespace nlcs;
using cd = std::complex<double>;

TEST_CASE("canonical state is Poissonian") {
  const auto st = build_state(Nonlinearity::identity(), {2.0, 0.0});
  const auto p = photon_distribution(st);
  CHECK(p[0] == doctest::Approx(std::exp(-4.0)).epsilon(1e-13));
  for (std::size_t n = 0; n < 30; ++n) {
    const double want = std::exp(-4.0 + n * std::log(4.0) - std::lgamma(n + 1.0));
    CHECK(p[n] == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(st.norm_log() == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("beta normalization matches the high-precision reference") {
  const auto st = build_state(Nonlinearity::beta_exp(1.0), {1.0, 0.0});
  CHECK(std::exp(st.norm_log()) == doctest::Approx(oracle::kBeta1Z1Norm).epsilon(1e-13));
  const auto p = photon_distribution(st);
  double mean = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) mean += n * p[n];
  CHECK(mean == doctest::Approx(oracle::kBeta1Z1Mean).epsilon(1e-12));
}

TEST_CASE("q-sinh normalization matches the high-precision reference") {
  const auto st = build_state(Nonlinearity::q_sinh(1.5), {1.2, 0.0});
  CHECK(std::exp(st.norm_log()) == doctest::Approx(oracle::kQSinh15Z12Norm).epsilon(1e-12));
}

TEST_CASE("lambda zero is geometric") {
  const double r = 0.8;
  const auto st = build_state(Nonlinearity::lambda_exp(0.0), {0.0, r});
  const auto p = photon_distribution(st);
  for (std::size_t n = 0; n < 60; ++n) {
    CHECK(p[n] == doctest::Approx((1 - r * r) * std::pow(r * r, static_cast<double>(n))).epsilon(1e-11));
  }
}

TEST_CASE("imaginary beta keeps the Poisson distribution") {
  const cd z(1.5, -0.7);
  const auto a = photon_distribution(build_state(Nonlinearity::beta_imaginary(0.7), z));
  const auto b = photon_distribution(build_state(Nonlinearity::identity(), z));
  REQUIRE(a.size() == b.size());
  for (std::size_t n = 0; n < a.size(); ++n) CHECK(a[n] == doctest::Approx(b[n]).epsilon(1e-12));
}

TEST_CASE("Kerr evolution matches the explicit phase") {
  const cd z(1.1, 0.4);
  const double t = 0.35;
  const auto kerr = kerr_evolve(z, t).amplitudes();
  const auto can = build_state(Nonlinearity::identity(), z).amplitudes();
  REQUIRE(kerr.size() == can.size());
  for (std::size_t n = 0; n < kerr.size(); ++n) {
    const double nn = static_cast<double>(n);
    const cd want = can[n] * std::polar(1.0, -t * (nn * nn + nn));
    CHECK(std::abs(kerr[n] - want) <= 1e-12);
  }
}

TEST_CASE("q-exponential equals beta at ln q") {
  const cd z(0.9, 0.3);
  const auto a = build_state(Nonlinearity::q_exp(2.0), z).amplitudes();
  const auto b = build_state(Nonlinearity::beta_exp(std::log(2.0)), z).amplitudes();
  REQUIRE(a.size() == b.size());
  for (std::size_t n = 0; n < a.size(); ++n) CHECK(std::abs(a[n] - b[n]) <= 1e-12);
}

TEST_CASE("lambda domain boundary") {
  CHECK_THROWS_AS(build_state(Nonlinearity::lambda_exp(0.5), {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(build_state(Nonlinearity::lambda_exp(0.5), std::polar(1.3, 0.4)), DomainError);
  CHECK_NOTHROW(build_state(Nonlinearity::lambda_exp(2.0), {1.0 - 1e-6, 0.0}));
  // Inside the domain; the slowly decaying tail exhausts the cutoff cap instead.
  CHECK_THROWS_AS(build_state(Nonlinearity::lambda_exp(0.5), {1.0 - 1e-6, 0.0}), ConvergenceError);
  CHECK_THROWS_AS(build_state(Nonlinearity::identity(), {std::nan(""), 0.0}), DomainError);
}

TEST_CASE("vacuum at the origin") {
  for (auto s : {Nonlinearity::identity(), Nonlinearity::beta_exp(3.0), Nonlinearity::lambda_exp(1.0)}) {
    const auto st = build_state(s, {0.0, 0.0});
    CHECK(st.cutoff() == 0);
    CHECK(st.amplitudes()[0] == cd(1.0, 0.0));
  }
}

TEST_CASE("normalization and tail bound") {
  for (auto [s, z] : {std::pair{Nonlinearity::identity(), cd(7.0, 3.0)},
                      std::pair{Nonlinearity::beta_exp(0.5), cd(5.0, 0.0)},
                      std::pair{Nonlinearity::beta_exp(7.5), cd(200.0, 0.0)},
                      std::pair{Nonlinearity::lambda_exp(2.0), cd(0.0, 0.95)},
                      std::pair{Nonlinearity::lambda_exp(-1.0), cd(0.9, 0.0)},
                      std::pair{Nonlinearity::q_sinh(2.0), cd(-3.0, 1.0)},
                      std::pair{Nonlinearity::beta_imaginary(1.0), cd(4.0, 0.0)}}) {
    const auto st = build_state(s, z);
    CHECK(st.amplitudes().norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(st.tail_bound() <= 1e-12);
    CHECK(st.tail_bound() >= 0.0);
  }
}

TEST_CASE("cutoff stability under a tighter tolerance") {
  const cd z(3.0, 1.0);
  const auto a = build_state(Nonlinearity::beta_exp(0.2), z, 1e-10).amplitudes();
  const auto b = build_state(Nonlinearity::beta_exp(0.2), z, 1e-14).amplitudes();
  CHECK(b.size() >= a.size());
  for (std::size_t n = 0; n < a.size(); ++n) CHECK(std::abs(a[n] - b[n]) <= 1e-9);
}

TEST_CASE("fixed cutoff truncates exactly") {
  BuildOptions opts;
  opts.fixed_cutoff = 5;
  const auto st = build_state(Nonlinearity::identity(), {3.0, 0.0}, opts);
  CHECK(st.cutoff() == 5);
  CHECK(st.amplitudes().norm_squared() == doctest::Approx(1.0));
}

TEST_CASE("convergence failure past the cutoff cap") {
  BuildOptions opts;
  opts.max_cutoff = 40;
  CHECK_THROWS_AS(build_state(Nonlinearity::identity(), {30.0, 0.0}, opts), ConvergenceError);
  CHECK_THROWS_AS(build_state(Nonlinearity::lambda_exp(0.0), {0.999, 0.0}, opts), ConvergenceError);
}

TEST_CASE("unnormalized terms") {
  const auto t = unnormalized_term(Nonlinearity::beta_exp(1.0), {2.0, 0.0}, 3);
  // 2^3 / (sqrt(3!) * e^6)
  CHECK(t.log_magnitude == doctest::Approx(3 * std::log(2.0) - 0.5 * std::log(6.0) - 6.0).epsilon(1e-14));
  const auto u = unnormalized_term(Nonlinearity::identity(), std::polar(1.0, 0.5), 4);
  CHECK(u.phase == doctest::Approx(2.0));
}

TEST_CASE("state JSON round trip") {
  const auto st = build_state(Nonlinearity::lambda_exp(0.5), {0.3, -0.6});
  const auto j = state_to_json(st);
  const auto back = state_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.spec() == st.spec());
  CHECK(back.z() == st.z());
  CHECK(back.cutoff() == st.cutoff());
  CHECK(back.norm_log() == st.norm_log());
  CHECK(back.tail_bound() == st.tail_bound());
  for (std::size_t n = 0; n <= st.cutoff(); ++n) {
    CHECK(back.coeffs()[n].log_magnitude == st.coeffs()[n].log_magnitude);
    CHECK(back.coeffs()[n].phase == st.coeffs()[n].phase);
  }
  const auto v = state_from_json(state_to_json(build_state(Nonlinearity::identity(), {0.0, 0.0})));
  CHECK(v.cutoff() == 0);
}
