#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../tools/cli.hpp"
#include "nlcs/identity_resolution.hpp"
#include "nlcs/scan.hpp"
#include "nlcs/state.hpp"
#include "nlcs/wigner.hpp"
#include "oracle_values.hpp"

using namespace nlcs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  args.insert(args.end(), {"--format", "json", "-o", "-"});
  const auto r = run(args);
  REQUIRE(r.code == 0);
  return json::parse(r.out);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& s) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "nlcs_cli_test";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("exit codes") {
  const auto dom = run({"state", "--family", "lambda", "--lambda", "0", "--z", "1.0", "-o", "-"});
  CHECK(dom.code == cli::kExitDomain);
  CHECK(dom.err.find("domain") != std::string::npos);
  CHECK(std::count(dom.err.begin(), dom.err.end(), '\n') == 1);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"state", "--family", "gamma", "--z", "1"}).code == cli::kExitUsage);
  CHECK(run({"state", "--family", "beta", "--beta", "1", "--z", "1", "--format", "xml"}).code == cli::kExitUsage);
  CHECK(run({"threshold", "--family", "identity", "--z", "1", "--lo", "0", "--hi", "1", "-o", "-"}).code ==
        cli::kExitDomain);
  CHECK(run({"threshold", "--family", "beta", "--z", "15"}).code == cli::kExitUsage);
  CHECK(run({"state", "--family", "identity", "--z", "30", "--max-cutoff", "40", "-o", "-"}).code ==
        cli::kExitConvergence);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("state CSV is the Poisson distribution") {
  const auto r = run({"state", "--family", "identity", "--z", "2", "-o", "-"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() > 20);
  CHECK(rows[0] == std::vector<std::string>{"n", "re", "im", "log_abs", "phase", "p"});
  for (std::size_t n = 0; n < 20; ++n) {
    const double p = std::stod(rows[n + 1][5]);
    CHECK(p == doctest::Approx(std::exp(-4.0 + n * std::log(4.0) - std::lgamma(n + 1.0))).epsilon(1e-12));
  }
  const auto b = parse_csv(run({"state", "--family", "beta", "--beta", "1", "--z", "1", "-o", "-"}).out);
  const auto st = build_state(Nonlinearity::beta_exp(1.0), {1.0, 0.0});
  const auto p = photon_distribution(st);
  REQUIRE(b.size() == p.size() + 1);
  for (std::size_t n = 0; n < p.size(); ++n) CHECK(std::stod(b[n + 1][5]) == p[n]);
}

TEST_CASE("JSON outputs re-parse into their records") {
  const auto st = state_from_json(run_json({"state", "--family", "qsinh", "--q", "1.5", "--z", "1.2"}));
  CHECK(std::exp(st.norm_log()) == doctest::Approx(oracle::kQSinh15Z12Norm).epsilon(1e-12));

  const auto cr = criteria_report_from_json(run_json({"criteria", "--family", "beta", "--beta", "0.5", "--z", "5"}));
  CHECK(cr.s_x == criteria_report(build_state(Nonlinearity::beta_exp(0.5), {5.0, 0.0})).s_x);

  const auto v = run_json({"criteria", "--family", "beta", "--beta", "0.5", "--z", "5", "--verdict"});
  CHECK_FALSE(v["overall"].get<bool>());
  CHECK(criteria_report_from_json(v["report"]).q_mandel.has_value());

  const auto sw = sweep_table_from_json(
      run_json({"sweep", "--family", "beta", "--values", "1,2", "--z-values", "0,1,2"}));
  CHECK(sw.rows.size() == 6);
  CHECK(sw.params == std::vector<double>{1.0, 2.0});

  const auto wg = wigner_grid_from_json(
      run_json({"wigner", "--family", "identity", "--z", "1", "--nx", "5", "--np", "4"}));
  CHECK(wg.values.size() == 20);
  CHECK(wg.min_value >= -1e-9);

  const auto rad = radius_result_from_json(run_json({"radius", "--beta", "5"}));
  CHECK(rad.radius >= 10.0);
  CHECK(rad.radius <= 25.0);

  const auto th = threshold_result_from_json(
      run_json({"threshold", "--family", "beta", "--z", "15", "--lo", "0.5", "--hi", "10"}));
  CHECK(th.threshold >= 4.0);
  CHECK(th.threshold <= 6.5);

  const auto w = run_json({"weight", "--q", "2", "--q", "5", "--points", "4", "--log-space"});
  REQUIRE(w["samples"].size() == 2);
  const auto ws = weight_sample_from_json(w["samples"][1]);
  CHECK(ws.q == 5.0);
  CHECK(ws.sigma.size() == 4);

  const auto mo = moment_check_from_json(run_json({"moments", "--q", "1.5", "--n-max", "4"}));
  for (double e : mo.rel_errors) CHECK(e < 1e-5);

  const auto hk = hankel_minors_from_json(run_json({"hankel", "--q", "2", "--size", "3"}));
  CHECK(hk.minors0.size() == 3);
  for (const auto& m : hk.log_minors0) CHECK(m.sign == 1);

  const auto sp = run_json({"spectrum", "--family", "lambda", "--lambda", "1", "--n-max", "2"});
  CHECK(sp["levels"][0]["energy"].get<double>() == doctest::Approx(std::exp(2.0) / 2).epsilon(1e-14));
  CHECK(sp["levels"][0]["commutator"].get<double>() == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
}

TEST_CASE("figure presets") {
  const auto f7 = sweep_table_from_json(run_json({"sweep", "--figure", "7"}));
  CHECK(f7.family == Family::BetaExp);
  CHECK(f7.params == std::vector<double>{0.5, 1.0, 2.5, 5.0, 7.5});
  const auto f17 = sweep_table_from_json(run_json({"sweep", "--figure", "17", "--z-values", "0.001,0.5"}));
  CHECK(f17.family == Family::LambdaExp);
  bool saw_zero_lambda = false;
  for (const auto& row : f17.rows) {
    if (row.param == 0.0 && row.z.real() == 0.001) {
      saw_zero_lambda = true;
      CHECK(row.report->g2.value() == doctest::Approx(2.0).epsilon(1e-3));
    }
  }
  CHECK(saw_zero_lambda);
  CHECK(run({"sweep", "--figure", "1", "-o", "-"}).code == cli::kExitUsage);
  const auto f1 = run({"weight", "--figure", "1", "-o", "-"});
  CHECK(f1.code == 0);
  CHECK(f1.out.rfind("q,x,sigma\n", 0) == 0);
}

TEST_CASE("config file supplies flags the command line can override") {
  const auto dir = scratch_dir();
  const auto cfg = dir / "run.json";
  {
    std::ofstream f(cfg);
    f << R"({"family": "beta", "beta": 0.5, "z": 5, "format": "json"})";
  }
  const auto a = run({"criteria", "--config", cfg.string(), "-o", "-"});
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out)["s_x"].get<double>() < -0.1);
  const auto b = run({"criteria", "--config", cfg.string(), "--beta", "7.5", "--z", "15", "-o", "-"});
  REQUIRE(b.code == 0);
  CHECK(json::parse(b.out)["s_x"].get<double>() > -1e-3);
  CHECK(run({"criteria", "--config", (dir / "missing.json").string()}).code == cli::kExitUsage);
}

TEST_CASE("file outputs are reproducible and carry a sidecar") {
  const auto dir = scratch_dir();
  const auto out1 = dir / "sweep1.csv";
  const auto out2 = dir / "sweep2.csv";
  const std::vector<std::string> base{"sweep", "--family", "lambda", "--values", "0,2.5", "--z-values", "0.3,0.9"};
  auto a1 = base;
  a1.insert(a1.end(), {"-o", out1.string()});
  auto a2 = base;
  a2.insert(a2.end(), {"-o", out2.string()});
  REQUIRE(run(a1).code == 0);
  REQUIRE(run(a2).code == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(slurp(out1).find('\r') == std::string::npos);
  const auto meta1 = slurp(fs::path(out1.string() + ".meta.json"));
  const auto meta = json::parse(meta1);
  CHECK(meta.contains("arguments"));
  CHECK(meta.contains("simd_backend"));
  REQUIRE(run(a1).code == 0);
  CHECK(slurp(fs::path(out1.string() + ".meta.json")) == meta1);
  const auto again = run({"sweep", "--family", "lambda", "--values", "0,2.5", "--z-values", "0.3,0.9", "-o", "-"});
  CHECK(again.out == slurp(out1));
}

TEST_CASE("cutoff cap from the environment") {
  ::setenv("DCL_MAX_CUTOFF", "40", 1);
  const auto tight = run({"state", "--family", "identity", "--z", "30", "-o", "-"});
  ::setenv("DCL_MAX_CUTOFF", "abc", 1);
  const auto bad = run({"state", "--family", "identity", "--z", "1", "-o", "-"});
  ::unsetenv("DCL_MAX_CUTOFF");
  CHECK(tight.code == cli::kExitConvergence);
  CHECK(bad.code == cli::kExitUsage);
  CHECK(run({"state", "--family", "identity", "--z", "30", "-o", "-"}).code == cli::kExitOk);
}
