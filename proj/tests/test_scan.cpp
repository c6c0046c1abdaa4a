#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "nlcs/errors.hpp"
#include "nlcs/scan.hpp"

using namespace nlcs;
using cd = std::complex<double>;

namespace {

bool conjunction(const ClassicalityVerdict& v) {
  bool all = v.s_x_ok && v.s_p_ok && v.i_x_ok && v.i_y_ok && v.q_ok && v.g2_ok && v.a3_ok;
  if (v.wigner_ok) all = all && *v.wigner_ok;
  return all;
}

}  // namespace

TEST_CASE("config validation") {
  VerdictConfig c;
  CHECK_NOTHROW(c.validate());
  c.eps = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  VerdictConfig d;
  d.tol = std::nan("");
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  CHECK_THROWS_AS(classicality_verdict(Nonlinearity::identity(), {1.0, 0.0}, c), std::invalid_argument);
}

TEST_CASE("canonical states are classical") {
  const VerdictConfig cfg;
  const auto v = classicality_verdict(Nonlinearity::identity(), {5.0, 0.0}, cfg);
  CHECK(v.overall);
  CHECK(conjunction(v));
  CHECK_FALSE(v.wigner_ok.has_value());
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ur(0.0, 50.0);
  std::uniform_real_distribution<double> uphi(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 20; ++i) {
    CHECK(classicality_verdict(Nonlinearity::identity(), std::polar(ur(rng), uphi(rng)), cfg).overall);
  }
  CHECK(classicality_verdict(Nonlinearity::identity(), {0.0, 0.0}, cfg).overall);
}

TEST_CASE("small beta is non-classical") {
  const auto v = classicality_verdict(Nonlinearity::beta_exp(0.5), {5.0, 0.0}, VerdictConfig{});
  CHECK_FALSE(v.overall);
  CHECK_FALSE(v.s_x_ok);
  CHECK_FALSE(v.q_ok);
  CHECK(v.overall == conjunction(v));
}

TEST_CASE("threshold beta at large amplitude") {
  // s_x and Q sit just below -0.01 here, so the default tolerance rejects the point.
  VerdictConfig cfg;
  cfg.include_wigner = true;
  cfg.wigner_points = 41;
  const auto v = classicality_verdict(Nonlinearity::beta_exp(7.5), {200.0, 0.0}, cfg);
  CHECK_FALSE(v.overall);
  CHECK_FALSE(v.s_x_ok);
  REQUIRE(v.wigner_ok.has_value());
  CHECK(*v.wigner_ok);
  CHECK(*v.wigner_min >= -0.01);
  cfg.eps = 0.015;
  const auto w = classicality_verdict(Nonlinearity::beta_exp(7.5), {200.0, 0.0}, cfg);
  CHECK(w.overall);
  CHECK(w.overall == conjunction(w));
}

TEST_CASE("vacuum-like g2 is excused") {
  const VerdictConfig cfg;
  // Large beta at moderate z: g2 is tiny but the state is close to the vacuum.
  const auto v = classicality_verdict(Nonlinearity::beta_exp(5.0), {3.0, 0.0}, cfg);
  CHECK(v.report.g2.value() <= cfg.g2_vacuum_level);
  CHECK(v.g2_ok);
  CriteriaReport r;
  r.g2 = 0.5;
  r.mean_n = 0.5;
  CHECK_FALSE(verdict_from_report(r, cfg).g2_ok);
  r.mean_n = 1e-4;
  CHECK(verdict_from_report(r, cfg).g2_ok);
  r.g2.reset();
  r.mean_n = 0.0;
  CHECK(verdict_from_report(r, cfg).g2_ok);
}

TEST_CASE("strict Q mode") {
  CriteriaReport r;
  r.g2 = 1.0;
  r.mean_n = 1.0;
  r.q_mandel = 0.5;
  VerdictConfig cfg;
  CHECK(verdict_from_report(r, cfg).q_ok);
  cfg.strict_q = true;
  CHECK_FALSE(verdict_from_report(r, cfg).q_ok);
  r.q_mandel = -0.005;
  CHECK(verdict_from_report(r, cfg).q_ok);
}

TEST_CASE("strong lambda is classical across the disc") {
  const VerdictConfig cfg;
  for (int i = 1; i <= 50; ++i) {
    const double z = 0.99 * i / 50.0;
    CHECK(classicality_verdict(Nonlinearity::lambda_exp(5.5), {z, 0.0}, cfg).overall);
  }
  CHECK_THROWS_AS(classicality_verdict(Nonlinearity::lambda_exp(5.5), {1.0, 0.0}, cfg), DomainError);
}

TEST_CASE("sweeps") {
  VerdictConfig cfg;
  cfg.threads = 3;
  const std::vector<double> betas{0.5, 1.0, 2.5, 5.0, 7.5};
  std::vector<cd> zs;
  for (int i = 0; i <= 15; ++i) zs.emplace_back(static_cast<double>(i), 0.0);
  const auto a = sweep(Family::BetaExp, betas, zs, cfg);
  cfg.threads = 1;
  const auto b = sweep(Family::BetaExp, betas, zs, cfg);
  CHECK(a.rows.size() == betas.size() * zs.size());
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.rows[3 * zs.size() + 7].param == 5.0);
  CHECK(a.rows[3 * zs.size() + 7].z == cd(7.0, 0.0));
  // The largest beta coincides with the horizontal axis.
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const auto& r = *a.rows[4 * zs.size() + k].report;
    CHECK(r.s_x >= -1e-3);
    CHECK(r.q_mandel.value_or(0.0) >= -1e-3);
  }
  const auto one = sweep(Family::QSinh, {1.4}, {cd(0.8, -0.3)}, cfg);
  const auto direct = criteria_report(build_state(Nonlinearity::q_sinh(1.4), {0.8, -0.3}));
  REQUIRE(one.rows[0].report.has_value());
  CHECK(one.rows[0].report->s_x == direct.s_x);
  CHECK(one.rows[0].report->a3 == direct.a3);
  const auto header = a.to_csv().substr(0, a.to_csv().find('\n'));
  CHECK(header == "family,beta,z_re,z_im,s_x,s_p,i_x,i_y,q,g2,g2_display,a3,mean_n,cutoff,error");
}

TEST_CASE("out-of-domain cells become error rows") {
  const auto t = sweep(Family::LambdaExp, {0.0, 2.0}, {cd(0.5, 0.0), cd(1.0, 0.0)}, VerdictConfig{});
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0].report.has_value());
  CHECK_FALSE(t.rows[1].report.has_value());
  CHECK_FALSE(t.rows[1].error.empty());
  CHECK(t.to_csv().find("lambda") != std::string::npos);
}

TEST_CASE("threshold searches") {
  const VerdictConfig cfg;
  const auto b = threshold_parameter(Family::BetaExp, {15.0, 0.0}, cfg, 0.5, 10.0);
  CHECK(b.threshold >= 4.0);
  CHECK(b.threshold <= 6.5);
  CHECK(classicality_verdict(Nonlinearity::beta_exp(b.threshold), {15.0, 0.0}, cfg).overall);
  const auto l = threshold_parameter(Family::LambdaExp, {0.9, 0.0}, cfg, 0.0, 8.0);
  CHECK(l.threshold <= 5.25);
  CHECK_THROWS_AS(threshold_parameter(Family::Identity, {1.0, 0.0}, cfg, 0.0, 1.0), BracketError);
  CHECK_THROWS_AS(threshold_parameter(Family::BetaExp, {15.0, 0.0}, cfg, 0.5, 1.0), BracketError);
  CHECK_THROWS_AS(threshold_parameter(Family::BetaExp, {15.0, 0.0}, cfg, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("radius of coherence") {
  const VerdictConfig cfg;
  const auto r5 = radius_of_coherence(5.0, cfg);
  CHECK(r5.radius >= 10.0);
  CHECK(r5.radius <= 25.0);
  CHECK_FALSE(r5.capped);
  const auto r3 = radius_of_coherence(3.0, cfg);
  CHECK(r3.radius <= r5.radius);
  const auto r75 = radius_of_coherence(7.5, cfg);
  CHECK(r75.radius >= r5.radius);
  CHECK(r75.radius >= 140.0);
  CHECK(r75.radius <= 300.0);
  // Just inside and outside the returned radius.
  for (int k = 1; k <= 16; ++k) {
    CHECK(classicality_verdict(Nonlinearity::beta_exp(5.0), {r5.radius * k / 16.0, 0.0}, cfg).overall);
  }
  bool fails_beyond = false;
  for (int k = 1; k <= 16; ++k) {
    fails_beyond = fails_beyond ||
                   !classicality_verdict(Nonlinearity::beta_exp(5.0), {1.002 * r5.radius * k / 16.0, 0.0}, cfg).overall;
  }
  CHECK(fails_beyond);
  CHECK_THROWS_AS(radius_of_coherence(0.0, cfg), std::invalid_argument);
}

TEST_CASE("real probes and phase rotations") {
  // Rotating z by phi multiplies c_n by e^{i n phi}: phase-blind criteria are unchanged,
  // quadratures swap at quarter turns and the amplitude-squared pair at eighth turns.
  const auto spec = Nonlinearity::beta_exp(0.8);
  const double r = 3.0;
  const auto base = criteria_report(build_state(spec, {r, 0.0}));
  for (double phi : {0.3, 1.1, 2.0}) {
    const auto rot = criteria_report(build_state(spec, std::polar(r, phi)));
    CHECK(rot.q_mandel.value() == doctest::Approx(base.q_mandel.value()).epsilon(1e-10));
    CHECK(rot.g2.value() == doctest::Approx(base.g2.value()).epsilon(1e-10));
    CHECK(rot.a3.value() == doctest::Approx(base.a3.value()).epsilon(1e-9));
    CHECK(rot.mean_n == doctest::Approx(base.mean_n).epsilon(1e-12));
  }
  const auto quarter = criteria_report(build_state(spec, std::polar(r, std::numbers::pi / 2)));
  CHECK(quarter.s_x == doctest::Approx(base.s_p).epsilon(1e-9));
  CHECK(quarter.s_p == doctest::Approx(base.s_x).epsilon(1e-9));
  const auto eighth = criteria_report(build_state(spec, std::polar(r, std::numbers::pi / 4)));
  CHECK(eighth.i_x == doctest::Approx(base.i_y).epsilon(1e-9));
  CHECK(eighth.i_y == doctest::Approx(base.i_x).epsilon(1e-9));
  const VerdictConfig cfg;
  for (double phi : {std::numbers::pi / 2, std::numbers::pi, 1.5 * std::numbers::pi}) {
    CHECK(classicality_verdict(spec, std::polar(r, phi), cfg).overall ==
          classicality_verdict(spec, {r, 0.0}, cfg).overall);
  }
}

TEST_CASE("JSON round trips") {
  const VerdictConfig cfg;
  const auto v = classicality_verdict(Nonlinearity::beta_exp(0.5), {5.0, 0.0}, cfg);
  const auto j = to_json(v);
  CHECK(j["overall"].get<bool>() == v.overall);
  const auto rep = criteria_report_from_json(j["report"]);
  CHECK(rep.s_x == v.report.s_x);
  const auto t = sweep(Family::BetaExp, {1.0, 2.0}, {cd(1.0, 0.0), cd(2.0, 0.5)}, cfg);
  const auto t2 = sweep_table_from_json(nlohmann::json::parse(to_json(t).dump()));
  CHECK(t2.to_csv() == t.to_csv());
  ThresholdResult th{Family::BetaExp, {15.0, 0.0}, 5.0, 0.01, true, {"non_monotone"}};
  const auto th2 = threshold_result_from_json(nlohmann::json::parse(to_json(th).dump()));
  CHECK(th2.threshold == 5.0);
  CHECK(th2.non_monotone);
  CHECK(th2.family == Family::BetaExp);
  RadiusResult rr{7.5, 181.5, 0.01, false, {}};
  const auto jr = to_json(rr);
  for (const char* key : {"beta", "radius", "eps", "flags"}) CHECK(jr.contains(key));
  CHECK(radius_result_from_json(jr).radius == 181.5);
}
