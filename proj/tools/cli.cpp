#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nlcs/errors.hpp"
#include "nlcs/identity_resolution.hpp"
#include "nlcs/io.hpp"
#include "nlcs/moments.hpp"
#include "nlcs/nonlinearity.hpp"
#include "nlcs/scan.hpp"
#include "nlcs/simd/kernels.hpp"
#include "nlcs/state.hpp"
#include "nlcs/wigner.hpp"

namespace nlcs::cli {
namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// Bad flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = hi;
  return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  auto v = linspace(std::log(lo), std::log(hi), n);
  for (auto& x : v) x = std::exp(x);
  v.front() = lo;
  v.back() = hi;
  return v;
}

std::vector<std::complex<double>> real_points(const std::vector<double>& xs) {
  std::vector<std::complex<double>> zs;
  zs.reserve(xs.size());
  for (double x : xs) zs.emplace_back(x, 0.0);
  return zs;
}

// Parameter sets of the published figures; axis ranges are chosen to cover the plotted window.
struct SweepPreset {
  Family family;
  std::vector<double> params;
  std::vector<double> zs;
  const char* description;
};

const std::map<int, SweepPreset>& sweep_presets() {
  static const std::map<int, SweepPreset> presets = [] {
    const auto beta_axis = linspace(0.0, 8.0, 81);
    const auto lambda_axis = linspace(0.0, 6.0, 61);
    const auto z_beta = linspace(0.0, 15.0, 151);
    const auto z_lambda = linspace(0.0, 0.99, 100);
    std::map<int, SweepPreset> m;
    m[2] = {Family::BetaExp, beta_axis, {1, 2.5, 5, 10, 15}, "quadrature squeezing against beta"};
    m[3] = {Family::BetaExp, {0.5, 1, 2.5, 5, 7.5}, z_beta, "quadrature squeezing against z"};
    m[4] = {Family::BetaExp, linspace(0.0, 4.0, 81), {2.5, 5, 10, 15}, "amplitude-squared squeezing against beta"};
    m[5] = {Family::BetaExp, {0.25, 0.5, 1.5, 2}, z_beta, "amplitude-squared squeezing against z"};
    m[6] = {Family::BetaExp, beta_axis, {1, 2, 5, 10, 20}, "Mandel Q against beta"};
    m[7] = {Family::BetaExp, {0.5, 1, 2.5, 5, 7.5}, z_beta, "Mandel Q against z"};
    m[8] = {Family::BetaExp, beta_axis, {1, 2, 5, 10, 20}, "g2 against beta"};
    m[10] = {Family::BetaExp, linspace(0.0, 10.0, 101), {5, 10, 15, 200}, "A3 against beta"};
    m[11] = {Family::LambdaExp, lambda_axis, {0.25, 0.5, 0.75, 0.9}, "quadrature squeezing against lambda"};
    m[12] = {Family::LambdaExp, {0.5, 1, 2.5, 5, 5.5}, z_lambda, "quadrature squeezing against z"};
    m[13] = {Family::LambdaExp, lambda_axis, {0.25, 0.5, 0.75, 0.9}, "amplitude-squared squeezing against lambda"};
    m[14] = {Family::LambdaExp, {0, 1, 2, 4}, z_lambda, "amplitude-squared squeezing against z"};
    m[15] = {Family::LambdaExp, lambda_axis, {0.25, 0.5, 0.75, 0.9}, "Mandel Q against lambda"};
    m[16] = {Family::LambdaExp, {0, 1, 2.5, 5, 5.5}, z_lambda, "Mandel Q against z"};
    m[17] = {Family::LambdaExp, lambda_axis, {0.25, 0.5, 0.75, 0.95}, "g2 against lambda"};
    m[19] = {Family::LambdaExp, lambda_axis, {0.5, 0.75, 0.85, 0.95, 0.99}, "A3 against lambda"};
    return m;
  }();
  return presets;
}

struct WignerPreset {
  Family family;
  std::vector<double> params;
  double z;
  std::optional<PhaseGrid> grid;
};

const std::map<int, WignerPreset>& wigner_presets() {
  static const std::map<int, WignerPreset> presets = [] {
    std::map<int, WignerPreset> m;
    m[9] = {Family::BetaExp, {2, 4, 7.5}, 200.0, std::nullopt};
    PhaseGrid g;
    g.x_min = g.p_min = -3.0;
    g.x_max = g.p_max = 3.0;
    g.n_x = g.n_p = 121;
    m[18] = {Family::LambdaExp, {0, 0.5, 2}, 0.95, g};
    return m;
  }();
  return presets;
}

struct Args {
  // output
  std::string output = "-";
  std::string format = "csv";
  unsigned threads = 0;
  // state
  std::string family = "identity";
  double beta = 0.0;
  double lambda = 0.0;
  double q = 1.0;
  double param = 0.0;
  double z = 0.0;
  double z_im = 0.0;
  double tol = 1e-12;
  std::size_t max_cutoff = kDefaultMaxCutoff;
  std::size_t fixed_cutoff = 0;
  // verdict
  double eps = 0.01;
  double g2_vacuum_cut = 1e-3;
  double g2_vacuum_level = 0.01;
  bool strict_q = false;
  bool verdict = false;
  bool with_wigner = false;
  // grids
  double x_min = -3.0;
  double x_max = 3.0;
  double p_min = -3.0;
  double p_max = 3.0;
  std::size_t nx = 61;
  std::size_t np = 61;
  std::size_t points = 121;
  bool auto_grid = false;
  int figure = 0;
  // sweep
  std::vector<double> values;
  double param_min = 0.0;
  double param_max = 1.0;
  std::size_t param_points = 11;
  std::vector<double> z_values;
  double z_min = 0.0;
  double z_max = 1.0;
  std::size_t z_points = 11;
  // radius / threshold
  int probes = 16;
  double lo = 0.0;
  double hi = 1.0;
  // identity resolution
  std::vector<double> qs;
  double wx_min = 0.01;
  double wx_max = 50.0;
  std::size_t wpoints = 400;
  bool log_space = false;
  std::string form = "moment-consistent";
  double quad_tol = 1e-12;
  double moments_quad_tol = 1e-10;
  int n_max = 8;
  bool flat = false;
  std::size_t size = 6;
  std::string convention = "moment-targets";
  std::size_t spectrum_n_max = 20;
};

struct Context {
  CLI::App* sub = nullptr;
  Args a;
  std::vector<std::string> argv;
  std::ostream* out = nullptr;
};

bool given(const Context& c, const std::string& name) {
  const auto* opt = c.sub->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

Nonlinearity resolve_spec(const Context& c) {
  const Family f = parse_family(c.a.family);
  double p = 0.0;
  bool have = false;
  switch (f) {
    case Family::BetaExp:
    case Family::BetaImaginary:
      have = given(c, "--beta");
      p = c.a.beta;
      break;
    case Family::LambdaExp:
      have = given(c, "--lambda");
      p = c.a.lambda;
      break;
    case Family::QExp:
    case Family::QSinh:
      have = given(c, "--q");
      p = c.a.q;
      break;
    case Family::Identity:
      have = true;
      break;
  }
  if (!have && given(c, "--param")) {
    have = true;
    p = c.a.param;
  }
  if (!have) throw UsageError("family " + c.a.family + " needs its parameter (--" + parameter_name(f) + " or --param)");
  if (!std::isfinite(p)) throw UsageError("the family parameter must be finite");
  return Nonlinearity::make(f, p);
}

BuildOptions build_options(const Context& c) {
  BuildOptions o;
  o.tol = c.a.tol;
  o.max_cutoff = c.a.max_cutoff;
  if (given(c, "--cutoff")) o.fixed_cutoff = c.a.fixed_cutoff;
  return o;
}

VerdictConfig verdict_config(const Context& c) {
  VerdictConfig v;
  v.eps = c.a.eps;
  v.g2_vacuum_cut = c.a.g2_vacuum_cut;
  v.g2_vacuum_level = c.a.g2_vacuum_level;
  v.strict_q = c.a.strict_q;
  v.tol = c.a.tol;
  v.max_cutoff = c.a.max_cutoff;
  v.threads = c.a.threads;
  v.include_wigner = c.a.with_wigner;
  v.wigner_points = c.a.points;
  return v;
}

PhaseGrid explicit_grid(const Context& c) {
  PhaseGrid g;
  g.x_min = c.a.x_min;
  g.x_max = c.a.x_max;
  g.p_min = c.a.p_min;
  g.p_max = c.a.p_max;
  g.n_x = c.a.nx;
  g.n_p = c.a.np;
  g.validate();
  return g;
}

bool grid_given(const Context& c) {
  for (const char* n : {"--x-min", "--x-max", "--p-min", "--p-max", "--nx", "--np"}) {
    if (given(c, n)) return true;
  }
  return false;
}

void emit(const Context& c, const std::function<std::string()>& csv, const std::function<json()>& js) {
  const std::string body = c.a.format == "json" ? io::dump_json(js()) : csv();
  if (c.a.output == "-") {
    *c.out << body;
    c.out->flush();
    return;
  }
  io::write_output(c.a.output, body);
  json meta{{"tool", "nlcs"},
            {"version", kVersion},
            {"arguments", c.argv},
            {"format", c.a.format},
            {"simd_backend", std::string(simd::backend_name(simd::active_backend()))}};
  io::write_output(c.a.output + ".meta.json", io::dump_json(meta));
}

std::string report_header_csv(const CriteriaReport& r, const std::vector<std::pair<std::string, std::string>>& extra) {
  std::vector<std::string> head{"s_x", "s_p", "i_x", "i_y", "q", "g2", "g2_display", "a3", "mean_n"};
  std::vector<std::string> row{io::format_double(r.s_x),   io::format_double(r.s_p),   io::format_double(r.i_x),
                               io::format_double(r.i_y),   io::format_optional(r.q_mandel), io::format_optional(r.g2),
                               io::format_double(r.g2_display()), io::format_optional(r.a3), io::format_double(r.mean_n)};
  for (const auto& [k, v] : extra) {
    head.push_back(k);
    row.push_back(v);
  }
  io::CsvWriter csv(head);
  csv.row(row);
  return csv.str();
}

// ---- subcommands ----

void cmd_state(Context& c) {
  const auto st = build_state(resolve_spec(c), {c.a.z, c.a.z_im}, build_options(c));
  emit(
      c,
      [&] {
        io::CsvWriter csv({"n", "re", "im", "log_abs", "phase", "p"});
        const auto amps = st.amplitudes();
        const auto p = photon_distribution(st);
        for (std::size_t n = 0; n < st.coeffs().size(); ++n) {
          const auto& lc = st.coeffs()[n];
          csv.row({std::to_string(n), io::format_double(amps[n].real()), io::format_double(amps[n].imag()),
                   io::format_double(lc.log_magnitude), io::format_double(lc.phase), io::format_double(p[n])});
        }
        return csv.str();
      },
      [&] { return state_to_json(st); });
}

void cmd_criteria(Context& c) {
  const auto spec = resolve_spec(c);
  const std::complex<double> z(c.a.z, c.a.z_im);
  if (c.a.verdict || c.a.with_wigner) {
    auto cfg = verdict_config(c);
    if (c.a.with_wigner) {
      cfg.include_wigner = true;
      if (grid_given(c)) cfg.wigner_grid = explicit_grid(c);
    }
    const auto v = classicality_verdict(spec, z, cfg);
    emit(
        c,
        [&] {
          auto b = [](bool x) { return std::string(x ? "true" : "false"); };
          return report_header_csv(
              v.report, {{"s_x_ok", b(v.s_x_ok)},
                         {"s_p_ok", b(v.s_p_ok)},
                         {"i_x_ok", b(v.i_x_ok)},
                         {"i_y_ok", b(v.i_y_ok)},
                         {"q_ok", b(v.q_ok)},
                         {"g2_ok", b(v.g2_ok)},
                         {"a3_ok", b(v.a3_ok)},
                         {"wigner_ok", v.wigner_ok ? b(*v.wigner_ok) : std::string()},
                         {"wigner_min", io::format_optional(v.wigner_min)},
                         {"overall", b(v.overall)}});
        },
        [&] { return to_json(v); });
    return;
  }
  const auto r = criteria_report(build_state(spec, z, build_options(c)));
  emit(c, [&] { return report_header_csv(r, {}); }, [&] { return to_json(r); });
}

void cmd_sweep(Context& c) {
  Family family = parse_family(c.a.family);
  std::vector<double> params;
  std::vector<double> zs;
  if (c.a.figure != 0) {
    const auto it = sweep_presets().find(c.a.figure);
    if (it == sweep_presets().end()) throw UsageError("no sweep preset for figure " + std::to_string(c.a.figure));
    family = it->second.family;
    params = it->second.params;
    zs = it->second.zs;
  }
  if (!c.a.values.empty()) {
    params = c.a.values;
  } else if (given(c, "--param-min") || given(c, "--param-max") || given(c, "--param-points") || params.empty()) {
    if (c.a.param_points < 1) throw UsageError("--param-points must be at least 1");
    params = linspace(c.a.param_min, c.a.param_max, c.a.param_points);
  }
  if (!c.a.z_values.empty()) {
    zs = c.a.z_values;
  } else if (given(c, "--z-min") || given(c, "--z-max") || given(c, "--z-points") || zs.empty()) {
    if (c.a.z_points < 1) throw UsageError("--z-points must be at least 1");
    zs = linspace(c.a.z_min, c.a.z_max, c.a.z_points);
  }
  const auto t = sweep(family, params, real_points(zs), verdict_config(c));
  emit(c, [&] { return t.to_csv(); }, [&] { return to_json(t); });
}

void cmd_wigner(Context& c) {
  WignerOptions wopts;
  wopts.threads = c.a.threads;
  if (c.a.figure != 0) {
    const auto it = wigner_presets().find(c.a.figure);
    if (it == wigner_presets().end()) throw UsageError("no Wigner preset for figure " + std::to_string(c.a.figure));
    const auto& pre = it->second;
    std::vector<WignerGrid> panels;
    for (double p : pre.params) {
      const auto st = build_state(Nonlinearity::make(pre.family, p), {pre.z, 0.0}, build_options(c));
      PhaseGrid g = grid_given(c) ? explicit_grid(c) : (pre.grid ? *pre.grid : auto_grid(st, c.a.points));
      panels.push_back(wigner_grid(st, g, wopts));
    }
    const std::string pname = parameter_name(pre.family);
    emit(
        c,
        [&] {
          io::CsvWriter csv({"panel", pname, "x", "p", "W"});
          for (std::size_t k = 0; k < panels.size(); ++k) {
            const auto& w = panels[k];
            for (std::size_t i = 0; i < w.grid.n_x; ++i) {
              for (std::size_t j = 0; j < w.grid.n_p; ++j) {
                csv.row({std::string(1, static_cast<char>('a' + k)), io::format_double(pre.params[k]),
                         io::format_double(w.grid.x(i)), io::format_double(w.grid.p(j)), io::format_double(w.at(i, j))});
              }
            }
          }
          return csv.str();
        },
        [&] {
          json arr = json::array();
          for (std::size_t k = 0; k < panels.size(); ++k) {
            arr.push_back({{"panel", std::string(1, static_cast<char>('a' + k))},
                           {pname, pre.params[k]},
                           {"z", pre.z},
                           {"wigner", to_json(panels[k])}});
          }
          return json{{"figure", c.a.figure}, {"family", std::string(family_name(pre.family))}, {"panels", arr}};
        });
    return;
  }
  const auto st = build_state(resolve_spec(c), {c.a.z, c.a.z_im}, build_options(c));
  const PhaseGrid g = c.a.auto_grid ? auto_grid(st, c.a.points) : explicit_grid(c);
  const auto w = wigner_grid(st, g, wopts);
  emit(c, [&] { return wigner_csv(w); }, [&] { return to_json(w); });
}

void cmd_radius(Context& c) {
  if (!given(c, "--beta")) throw UsageError("radius needs --beta");
  const auto r = radius_of_coherence(c.a.beta, verdict_config(c), c.a.probes);
  emit(
      c,
      [&] {
        io::CsvWriter csv({"beta", "radius", "eps", "capped", "flags"});
        std::string flags;
        for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
        csv.row({io::format_double(r.beta), io::format_double(r.radius), io::format_double(r.eps),
                 r.capped ? "true" : "false", flags});
        return csv.str();
      },
      [&] { return to_json(r); });
}

void cmd_threshold(Context& c) {
  const Family family = parse_family(c.a.family);
  const auto r = threshold_parameter(family, {c.a.z, c.a.z_im}, verdict_config(c), c.a.lo, c.a.hi);
  emit(
      c,
      [&] {
        io::CsvWriter csv({"family", "z_re", "z_im", "threshold", "eps", "non_monotone"});
        csv.row({std::string(family_name(r.family)), io::format_double(r.z.real()), io::format_double(r.z.imag()),
                 io::format_double(r.threshold), io::format_double(r.eps), r.non_monotone ? "true" : "false"});
        return csv.str();
      },
      [&] { return to_json(r); });
}

SigmaForm parse_form(const std::string& s) {
  if (s == "moment-consistent") return SigmaForm::MomentConsistent;
  if (s == "as-printed") return SigmaForm::AsPrinted;
  throw UsageError("unknown weight form " + s + " (moment-consistent or as-printed)");
}

void cmd_weight(Context& c) {
  std::vector<double> qs = c.a.qs;
  if (c.a.figure != 0) {
    if (c.a.figure != 1) throw UsageError("no weight preset for figure " + std::to_string(c.a.figure));
    if (qs.empty()) qs = {2, 5, 10};
  }
  if (qs.empty()) throw UsageError("weight needs --q");
  if (!(c.a.wx_min > 0.0 && c.a.wx_max > c.a.wx_min)) throw UsageError("weight needs 0 < --x-min < --x-max");
  if (c.a.wpoints < 2) throw UsageError("--points must be at least 2");
  const auto xs = c.a.log_space ? logspace(c.a.wx_min, c.a.wx_max, c.a.wpoints) : linspace(c.a.wx_min, c.a.wx_max, c.a.wpoints);
  const SigmaForm form = parse_form(c.a.form);
  std::vector<WeightFunctionSample> samples;
  for (double q : qs) samples.push_back(sample_weight(q, xs, c.a.quad_tol, form));
  emit(
      c,
      [&] {
        io::CsvWriter csv({"q", "x", "sigma"});
        for (const auto& s : samples) {
          for (std::size_t i = 0; i < s.xs.size(); ++i) csv.row_numbers({s.q, s.xs[i], s.sigma[i]});
        }
        return csv.str();
      },
      [&] {
        json arr = json::array();
        for (const auto& s : samples) arr.push_back(to_json(s));
        return json{{"form", c.a.form}, {"samples", arr}};
      });
}

void cmd_moments(Context& c) {
  MomentCheckReport r;
  if (c.a.flat) {
    r = verify_flat_weight_moments(c.a.n_max, c.a.moments_quad_tol);
  } else {
    if (c.a.qs.size() != 1) throw UsageError("moments needs exactly one --q (or --flat)");
    r = verify_moments(c.a.qs.front(), c.a.n_max, c.a.moments_quad_tol, parse_form(c.a.form));
  }
  emit(
      c,
      [&] {
        io::CsvWriter csv({"n", "lhs", "rhs", "rel_error"});
        for (std::size_t i = 0; i < r.orders.size(); ++i) {
          csv.row({std::to_string(r.orders[i]), io::format_double(r.lhs[i]), io::format_double(r.rhs[i]),
                   io::format_double(r.rel_errors[i])});
        }
        return csv.str();
      },
      [&] { return to_json(r); });
}

void cmd_hankel(Context& c) {
  if (c.a.qs.size() != 1) throw UsageError("hankel needs exactly one --q");
  HankelConvention conv;
  if (c.a.convention == "moment-targets") {
    conv = HankelConvention::MomentTargets;
  } else if (c.a.convention == "as-printed") {
    conv = HankelConvention::AsPrinted;
  } else {
    throw UsageError("unknown convention " + c.a.convention + " (moment-targets or as-printed)");
  }
  const auto h = hankel_hadamard_minors(c.a.qs.front(), c.a.size, conv);
  emit(
      c,
      [&] {
        io::CsvWriter csv({"k", "minor0", "minor1", "sign0", "log_abs0", "sign1", "log_abs1"});
        for (std::size_t k = 0; k < h.minors0.size(); ++k) {
          csv.row({std::to_string(k + 1), io::format_double(h.minors0[k]), io::format_double(h.minors1[k]),
                   std::to_string(h.log_minors0[k].sign), io::format_double(h.log_minors0[k].log_abs),
                   std::to_string(h.log_minors1[k].sign), io::format_double(h.log_minors1[k].log_abs)});
        }
        return csv.str();
      },
      [&] { return to_json(h); });
}

void cmd_spectrum(Context& c) {
  const auto spec = resolve_spec(c);
  const auto s = hamiltonian_spectrum(spec, c.a.spectrum_n_max);
  emit(
      c,
      [&] {
        io::CsvWriter csv({"n", "energy", "commutator"});
        for (const auto& l : s.levels) {
          csv.row({std::to_string(l.n), io::format_double(l.energy),
                   io::format_double(deformed_commutator_diag(spec, l.n))});
        }
        return csv.str();
      },
      [&] {
        json levels = json::array();
        for (const auto& l : s.levels) {
          levels.push_back({{"n", l.n}, {"energy", l.energy}, {"commutator", deformed_commutator_diag(spec, l.n)}});
        }
        return json{{"spec", spec}, {"levels", levels}};
      });
}

// ---- option wiring ----

void add_output(CLI::App* s, Args& a) {
  s->add_option("-o,--output", a.output, "Output path, - for standard output")->capture_default_str();
  s->add_option("--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  s->add_option("--threads", a.threads, "Worker threads (0 = hardware concurrency)");
}

void add_family(CLI::App* s, Args& a, bool with_params) {
  s->add_option("--family", a.family, "identity, beta, beta-imag, lambda, qexp or qsinh")
      ->check(CLI::IsMember({"identity", "beta", "beta-imag", "lambda", "qexp", "qsinh"}))
      ->capture_default_str();
  if (!with_params) return;
  s->add_option("--beta", a.beta, "beta for the beta and beta-imag families");
  s->add_option("--lambda", a.lambda, "lambda for the lambda family");
  s->add_option("--q", a.q, "q for the qexp and qsinh families");
  s->add_option("--param", a.param, "Family parameter when no named flag is given");
}

void add_build(CLI::App* s, Args& a) {
  s->add_option("--tol", a.tol, "Discarded-mass tolerance of the cutoff rule")->capture_default_str();
  s->add_option("--max-cutoff", a.max_cutoff, "Hard cap on the Fock cutoff");
}

void add_z(CLI::App* s, Args& a) {
  s->add_option("--z", a.z, "Real part of z");
  s->add_option("--z-im", a.z_im, "Imaginary part of z");
}

void add_verdict(CLI::App* s, Args& a) {
  s->add_option("--eps", a.eps, "Tolerated negativity of each criterion")->capture_default_str();
  s->add_option("--g2-vacuum-cut", a.g2_vacuum_cut, "Mean photon number below which g2 < 1 is vacuum-like");
  s->add_option("--g2-vacuum-level", a.g2_vacuum_level, "g2 level at or below which the state is vacuum-like");
  s->add_flag("--strict-q", a.strict_q, "Require |Q| <= eps");
}

void add_grid(CLI::App* s, Args& a) {
  s->add_option("--x-min", a.x_min);
  s->add_option("--x-max", a.x_max);
  s->add_option("--p-min", a.p_min);
  s->add_option("--p-max", a.p_max);
  s->add_option("--nx", a.nx, "Grid points along x");
  s->add_option("--np", a.np, "Grid points along p");
  s->add_option("--points", a.points, "Points per axis of an automatic grid");
}

// Appends flags from a flat JSON object unless the command line already sets them.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;
  std::ifstream f(path);
  if (!f) throw CLI::FileError("cannot read config file " + path);
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::parse_error& e) {
    throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
  auto on_command_line = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(rest.begin(), rest.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  auto scalar = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return io::format_double(v.get<double>());
    throw CLI::ConversionError("config values must be strings, numbers, booleans or arrays of those");
  };
  for (const auto& [key, v] : cfg.items()) {
    if (on_command_line(key)) continue;
    if (v.is_boolean()) {
      if (v.get<bool>()) rest.push_back("--" + key);
    } else if (v.is_array()) {
      rest.push_back("--" + key);
      for (const auto& e : v) rest.push_back(scalar(e));
    } else {
      rest.push_back("--" + key);
      rest.push_back(scalar(v));
    }
  }
  return rest;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Context c;
  c.out = &out;
  c.argv = raw_args;
  if (const char* env = std::getenv("DCL_MAX_CUTOFF")) {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(env, &pos);
      if (pos != std::string(env).size() || v == 0) throw std::invalid_argument("bad value");
      c.a.max_cutoff = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      err << "error: DCL_MAX_CUTOFF must be a positive integer\n";
      return kExitUsage;
    }
  }

  CLI::App app{"Nonlinear coherent state numerics: non-classicality criteria, Wigner functions and weights"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::map<CLI::App*, std::function<void(Context&)>> handlers;
  Args& a = c.a;

  auto* st = app.add_subcommand("state", "Fock coefficients and photon distribution of a state");
  add_family(st, a, true);
  add_z(st, a);
  add_build(st, a);
  st->add_option("--cutoff", a.fixed_cutoff, "Truncate at exactly this index");
  add_output(st, a);
  handlers[st] = cmd_state;

  auto* cr = app.add_subcommand("criteria", "All non-classicality criteria of one state");
  add_family(cr, a, true);
  add_z(cr, a);
  add_build(cr, a);
  cr->add_option("--cutoff", a.fixed_cutoff, "Truncate at exactly this index");
  add_verdict(cr, a);
  cr->add_flag("--verdict", a.verdict, "Add the classicality verdict");
  cr->add_flag("--wigner", a.with_wigner, "Include Wigner negativity in the verdict");
  add_grid(cr, a);
  add_output(cr, a);
  handlers[cr] = cmd_criteria;

  auto* sw = app.add_subcommand("sweep", "Criteria over a parameter by z table");
  add_family(sw, a, false);
  sw->add_option("--figure", a.figure, "Published parameter set: 2-8, 10-17 or 19");
  sw->add_option("--values", a.values, "Explicit parameter values")->delimiter(',');
  sw->add_option("--param-min", a.param_min);
  sw->add_option("--param-max", a.param_max);
  sw->add_option("--param-points", a.param_points);
  sw->add_option("--z-values", a.z_values, "Explicit real z values")->delimiter(',');
  sw->add_option("--z-min", a.z_min);
  sw->add_option("--z-max", a.z_max);
  sw->add_option("--z-points", a.z_points);
  add_build(sw, a);
  add_output(sw, a);
  handlers[sw] = cmd_sweep;

  auto* wg = app.add_subcommand("wigner", "Wigner function on a phase-space grid");
  add_family(wg, a, true);
  add_z(wg, a);
  add_build(wg, a);
  add_grid(wg, a);
  wg->add_flag("--auto-grid", a.auto_grid, "Centre and size the grid from the state");
  wg->add_option("--figure", a.figure, "Published panels: 9 or 18");
  add_output(wg, a);
  handlers[wg] = cmd_wigner;

  auto* rd = app.add_subcommand("radius", "Radius of coherence of a beta-state");
  rd->add_option("--beta", a.beta, "beta > 0");
  rd->add_option("--probes", a.probes, "Real probe points in (0, R]")->capture_default_str();
  add_verdict(rd, a);
  add_build(rd, a);
  add_output(rd, a);
  handlers[rd] = cmd_radius;

  auto* th = app.add_subcommand("threshold", "Parameter at which every criterion turns classical");
  add_family(th, a, false);
  add_z(th, a);
  th->add_option("--lo", a.lo, "Lower bracket (non-classical)")->required();
  th->add_option("--hi", a.hi, "Upper bracket (classical)")->required();
  add_verdict(th, a);
  add_build(th, a);
  add_output(th, a);
  handlers[th] = cmd_threshold;

  auto* wt = app.add_subcommand("weight", "Weight function of the resolution of identity");
  wt->add_option("--q", a.qs, "q > 1 (repeatable)");
  wt->add_option("--x-min", a.wx_min)->capture_default_str();
  wt->add_option("--x-max", a.wx_max)->capture_default_str();
  wt->add_option("--points", a.wpoints)->capture_default_str();
  wt->add_flag("--log-space", a.log_space, "Logarithmic x spacing");
  wt->add_option("--form", a.form, "moment-consistent or as-printed")->capture_default_str();
  wt->add_option("--quad-tol", a.quad_tol)->capture_default_str();
  wt->add_option("--figure", a.figure, "Published parameter set: 1");
  add_output(wt, a);
  handlers[wt] = cmd_weight;

  auto* mo = app.add_subcommand("moments", "Moments recovered from the weight function");
  mo->add_option("--q", a.qs, "q > 1");
  mo->add_option("--n-max", a.n_max)->capture_default_str();
  mo->add_option("--form", a.form, "moment-consistent or as-printed")->capture_default_str();
  mo->add_option("--quad-tol", a.moments_quad_tol)->capture_default_str();
  mo->add_flag("--flat", a.flat, "Check the flat weight e^{-x} instead");
  add_output(mo, a);
  handlers[mo] = cmd_moments;

  auto* hk = app.add_subcommand("hankel", "Leading minors of the Hankel-Hadamard matrices");
  hk->add_option("--q", a.qs, "q >= 1");
  hk->add_option("--size", a.size)->capture_default_str();
  hk->add_option("--convention", a.convention, "moment-targets or as-printed")->capture_default_str();
  add_output(hk, a);
  handlers[hk] = cmd_hankel;

  auto* sp = app.add_subcommand("spectrum", "Energy levels and commutator of the deformed oscillator");
  add_family(sp, a, true);
  sp->add_option("--n-max", a.spectrum_n_max)->capture_default_str();
  add_output(sp, a);
  handlers[sp] = cmd_spectrum;

  try {
    auto args = apply_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  for (auto& [sub, handler] : handlers) {
    if (!sub->parsed()) continue;
    c.sub = sub;
    try {
      handler(c);
      return kExitOk;
    } catch (const BracketError& e) {
      err << "error: " << e.what() << "\n";
      return kExitDomain;
    } catch (const DomainError& e) {
      err << "error: " << e.what() << "\n";
      return kExitDomain;
    } catch (const ConvergenceError& e) {
      err << "error: " << e.what() << "\n";
      return kExitConvergence;
    } catch (const QuadratureError& e) {
      err << "error: " << e.what() << "\n";
      return kExitConvergence;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  err << "error: no subcommand given\n";
  return kExitUsage;
}

}  // namespace nlcs::cli
