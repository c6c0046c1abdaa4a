#include "nlcs/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nlcs/errors.hpp"
#include "nlcs/io.hpp"

namespace nlcs {
namespace {

// Runs fn(i) for i in [0, count) on a bounded pool; rethrows the lowest-index failure.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr error;
  std::size_t error_index = count;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  unsigned n = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

BuildOptions build_options(const VerdictConfig& cfg) {
  BuildOptions opts;
  opts.tol = cfg.tol;
  opts.max_cutoff = cfg.max_cutoff;
  return opts;
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::optional<double> opt_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

nlohmann::json z_json(std::complex<double> z) { return nlohmann::json::array({z.real(), z.imag()}); }

std::complex<double> z_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

bool verdict_at(Family family, double param, std::complex<double> z, const VerdictConfig& cfg) {
  return classicality_verdict(Nonlinearity::make(family, param), z, cfg).overall;
}

}  // namespace

void VerdictConfig::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive and finite");
  if (!(g2_vacuum_cut >= 0.0) || !(g2_vacuum_level >= 0.0)) {
    throw std::invalid_argument("g2 vacuum thresholds must be non-negative");
  }
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tolerance must lie in (0, 1)");
  if (wigner_points < 2) throw std::invalid_argument("a Wigner grid needs at least two points per axis");
  if (wigner_grid) wigner_grid->validate();
}

ClassicalityVerdict verdict_from_report(const CriteriaReport& r, const VerdictConfig& cfg) {
  ClassicalityVerdict v;
  v.report = r;
  const double floor = -cfg.eps;
  v.s_x_ok = r.s_x >= floor;
  v.s_p_ok = r.s_p >= floor;
  v.i_x_ok = r.i_x >= floor;
  v.i_y_ok = r.i_y >= floor;
  if (r.q_mandel) v.q_ok = cfg.strict_q ? std::fabs(*r.q_mandel) <= cfg.eps : *r.q_mandel >= floor;
  if (r.g2) {
    v.g2_ok = *r.g2 >= 1.0 - cfg.eps || *r.g2 <= cfg.g2_vacuum_level || r.mean_n < cfg.g2_vacuum_cut;
  }
  if (r.a3) v.a3_ok = *r.a3 >= floor;
  v.overall = v.s_x_ok && v.s_p_ok && v.i_x_ok && v.i_y_ok && v.q_ok && v.g2_ok && v.a3_ok;
  return v;
}

ClassicalityVerdict classicality_verdict(const Nonlinearity& spec, std::complex<double> z, const VerdictConfig& cfg) {
  cfg.validate();
  const auto state = build_state(spec, z, build_options(cfg));
  auto v = verdict_from_report(criteria_report(state), cfg);
  if (cfg.include_wigner) {
    const auto psi = state.amplitudes();
    const PhaseGrid grid = cfg.wigner_grid ? *cfg.wigner_grid : auto_grid(psi, cfg.wigner_points);
    WignerOptions wopts;
    wopts.threads = cfg.threads;
    const auto w = wigner_grid(psi, grid, wopts);
    v.wigner_min = w.min_value;
    v.wigner_ok = w.min_value >= -cfg.eps;
    v.overall = v.overall && *v.wigner_ok;
  }
  return v;
}

std::string parameter_name(Family family) {
  switch (family) {
    case Family::BetaExp:
    case Family::BetaImaginary:
      return "beta";
    case Family::LambdaExp:
      return "lambda";
    case Family::QExp:
    case Family::QSinh:
      return "q";
    case Family::Identity:
      break;
  }
  return "param";
}

SweepTable sweep(Family family, const std::vector<double>& params, const std::vector<std::complex<double>>& zs,
                 const VerdictConfig& cfg) {
  cfg.validate();
  SweepTable t;
  t.family = family;
  t.params = params;
  t.zs = zs;
  t.rows.resize(params.size() * zs.size());
  parallel_for(t.rows.size(), cfg.threads, [&](std::size_t i) {
    SweepRow& row = t.rows[i];
    row.param = params[i / zs.size()];
    row.z = zs[i % zs.size()];
    try {
      const auto state = build_state(Nonlinearity::make(family, row.param), row.z, build_options(cfg));
      row.cutoff = state.cutoff();
      row.report = criteria_report(state);
    } catch (const DomainError& e) {
      row.error = std::string("domain: ") + e.what();
    } catch (const ConvergenceError& e) {
      row.error = std::string("convergence: ") + e.what();
    }
  });
  return t;
}

std::string SweepTable::to_csv() const {
  const std::string pname = parameter_name(family);
  io::CsvWriter csv({"family", pname, "z_re", "z_im", "s_x", "s_p", "i_x", "i_y", "q", "g2", "g2_display", "a3",
                     "mean_n", "cutoff", "error"});
  for (const auto& r : rows) {
    std::vector<std::string> f{std::string(family_name(family)), io::format_double(r.param),
                               io::format_double(r.z.real()), io::format_double(r.z.imag())};
    if (r.report) {
      const auto& c = *r.report;
      for (double v : {c.s_x, c.s_p, c.i_x, c.i_y}) f.push_back(io::format_double(v));
      f.push_back(io::format_optional(c.q_mandel));
      f.push_back(io::format_optional(c.g2));
      f.push_back(io::format_double(c.g2_display()));
      f.push_back(io::format_optional(c.a3));
      f.push_back(io::format_double(c.mean_n));
      f.push_back(std::to_string(r.cutoff));
      f.push_back("");
    } else {
      f.insert(f.end(), 10, "");
      // Commas never appear inside messages written to the table.
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      f.push_back(msg);
    }
    csv.row(f);
  }
  return csv.str();
}

ThresholdResult threshold_parameter(Family family, std::complex<double> z, const VerdictConfig& cfg, double lo,
                                    double hi) {
  cfg.validate();
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw BracketError("threshold bracket needs lo < hi");
  if (verdict_at(family, lo, z, cfg)) {
    std::ostringstream os;
    os << "verdict is already classical at the lower bracket " << lo;
    throw BracketError(os.str());
  }
  if (!verdict_at(family, hi, z, cfg)) {
    std::ostringstream os;
    os << "verdict is not classical at the upper bracket " << hi;
    throw BracketError(os.str());
  }
  constexpr double kWidth = 0.01;
  auto bisect = [&](double a, double b) {
    while (b - a > kWidth) {
      const double mid = 0.5 * (a + b);
      if (verdict_at(family, mid, z, cfg)) {
        b = mid;
      } else {
        a = mid;
      }
    }
    return b;
  };
  ThresholdResult r;
  r.family = family;
  r.z = z;
  r.eps = cfg.eps;
  r.threshold = bisect(lo, hi);

  // Monotone-exit check on 8 interior samples above the result.
  constexpr int kSamples = 8;
  std::vector<double> pts(kSamples);
  std::vector<char> ok(kSamples);
  for (int i = 0; i < kSamples; ++i) pts[i] = r.threshold + (hi - r.threshold) * (i + 1) / (kSamples + 1.0);
  parallel_for(kSamples, cfg.threads, [&](std::size_t i) { ok[i] = verdict_at(family, pts[i], z, cfg) ? 1 : 0; });
  int last_false = -1;
  for (int i = 0; i < kSamples; ++i) {
    if (!ok[i]) last_false = i;
  }
  if (last_false >= 0) {
    r.non_monotone = true;
    r.flags.push_back("non_monotone");
    const double upper = last_false + 1 < kSamples ? pts[last_false + 1] : hi;
    r.threshold = bisect(pts[last_false], upper);
  }
  return r;
}

RadiusResult radius_of_coherence(double beta, const VerdictConfig& cfg, int z_probe_count) {
  cfg.validate();
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive and finite");
  if (z_probe_count < 1) throw std::invalid_argument("at least one probe point is required");
  const auto spec = Nonlinearity::beta_exp(beta);
  const auto count = static_cast<std::size_t>(z_probe_count);
  auto classical = [&](double radius) {
    std::vector<char> ok(count);
    parallel_for(count, cfg.threads, [&](std::size_t k) {
      const double z = radius * static_cast<double>(k + 1) / static_cast<double>(count);
      ok[k] = classicality_verdict(spec, {z, 0.0}, cfg).overall ? 1 : 0;
    });
    return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  };

  RadiusResult r;
  r.beta = beta;
  r.eps = cfg.eps;
  double lo = 1.0;
  double hi = 1.0;
  if (classical(lo)) {
    for (;;) {
      hi = std::min(2.0 * lo, kRadiusCap);
      if (!classical(hi)) break;
      lo = hi;
      if (lo >= kRadiusCap) {
        r.radius = kRadiusCap;
        r.capped = true;
        r.flags.push_back("capped");
        return r;
      }
    }
  } else {
    constexpr double kFloor = 1e-6;
    for (;;) {
      hi = lo;
      lo = 0.5 * lo;
      if (classical(lo)) break;
      if (lo < kFloor) {
        r.radius = 0.0;
        r.flags.push_back("nonclassical_near_origin");
        return r;
      }
    }
  }
  while (hi / lo - 1.0 > 1e-3) {
    const double mid = std::sqrt(lo * hi);
    if (classical(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.radius = lo;
  return r;
}

nlohmann::json to_json(const ClassicalityVerdict& v) {
  nlohmann::json j{{"s_x_ok", v.s_x_ok}, {"s_p_ok", v.s_p_ok}, {"i_x_ok", v.i_x_ok}, {"i_y_ok", v.i_y_ok},
                   {"q_ok", v.q_ok},     {"g2_ok", v.g2_ok},   {"a3_ok", v.a3_ok},   {"overall", v.overall},
                   {"report", to_json(v.report)}};
  j["wigner_ok"] = v.wigner_ok ? nlohmann::json(*v.wigner_ok) : nlohmann::json(nullptr);
  j["wigner_min"] = opt_json(v.wigner_min);
  return j;
}

nlohmann::json to_json(const SweepTable& t) {
  nlohmann::json zs = nlohmann::json::array();
  for (const auto& z : t.zs) zs.push_back(z_json(z));
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json row{{"param", r.param}, {"z", z_json(r.z)}, {"cutoff", r.cutoff}};
    row["report"] = r.report ? to_json(*r.report) : nlohmann::json(nullptr);
    row["error"] = r.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.error);
    rows.push_back(row);
  }
  return nlohmann::json{{"family", std::string(family_name(t.family))},
                        {"param_name", parameter_name(t.family)},
                        {"params", t.params},
                        {"zs", zs},
                        {"rows", rows}};
}

nlohmann::json to_json(const ThresholdResult& r) {
  return nlohmann::json{{"family", std::string(family_name(r.family))},
                        {"param_name", parameter_name(r.family)},
                        {"z", z_json(r.z)},
                        {"threshold", r.threshold},
                        {"eps", r.eps},
                        {"non_monotone", r.non_monotone},
                        {"flags", r.flags}};
}

nlohmann::json to_json(const RadiusResult& r) {
  return nlohmann::json{{"beta", r.beta}, {"radius", r.radius}, {"eps", r.eps}, {"flags", r.flags}, {"capped", r.capped}};
}

CriteriaReport criteria_report_from_json(const nlohmann::json& j) {
  CriteriaReport r;
  r.s_x = j.at("s_x").get<double>();
  r.s_p = j.at("s_p").get<double>();
  r.i_x = j.at("i_x").get<double>();
  r.i_y = j.at("i_y").get<double>();
  r.q_mandel = opt_from(j.at("q"));
  r.g2 = opt_from(j.at("g2"));
  r.a3 = opt_from(j.at("a3"));
  r.mean_n = j.at("mean_n").get<double>();
  return r;
}

SweepTable sweep_table_from_json(const nlohmann::json& j) {
  SweepTable t;
  t.family = parse_family(j.at("family").get<std::string>());
  t.params = j.at("params").get<std::vector<double>>();
  for (const auto& z : j.at("zs")) t.zs.push_back(z_from(z));
  for (const auto& rj : j.at("rows")) {
    SweepRow r;
    r.param = rj.at("param").get<double>();
    r.z = z_from(rj.at("z"));
    r.cutoff = rj.at("cutoff").get<std::size_t>();
    if (!rj.at("report").is_null()) r.report = criteria_report_from_json(rj.at("report"));
    if (!rj.at("error").is_null()) r.error = rj.at("error").get<std::string>();
    t.rows.push_back(r);
  }
  if (t.rows.size() != t.params.size() * t.zs.size()) throw std::invalid_argument("sweep row count mismatch");
  return t;
}

ThresholdResult threshold_result_from_json(const nlohmann::json& j) {
  ThresholdResult r;
  r.family = parse_family(j.at("family").get<std::string>());
  r.z = z_from(j.at("z"));
  r.threshold = j.at("threshold").get<double>();
  r.eps = j.at("eps").get<double>();
  r.non_monotone = j.at("non_monotone").get<bool>();
  r.flags = j.at("flags").get<std::vector<std::string>>();
  return r;
}

RadiusResult radius_result_from_json(const nlohmann::json& j) {
  RadiusResult r;
  r.beta = j.at("beta").get<double>();
  r.radius = j.at("radius").get<double>();
  r.eps = j.at("eps").get<double>();
  r.flags = j.at("flags").get<std::vector<std::string>>();
  r.capped = j.at("capped").get<bool>();
  return r;
}

}  // namespace nlcs
