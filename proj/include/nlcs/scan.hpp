#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlcs/moments.hpp"
#include "nlcs/nonlinearity.hpp"
#include "nlcs/state.hpp"
#include "nlcs/wigner.hpp"

namespace nlcs {

struct VerdictConfig {
  /// Largest tolerated negativity of any criterion.
  double eps = 0.01;
  /// Grid for the Wigner check; an auto-sized grid is used when absent.
  std::optional<PhaseGrid> wigner_grid;
  bool include_wigner = false;
  std::size_t wigner_points = 61;
  /// Below this mean photon number g2 < 1 is excused as vacuum-like.
  double g2_vacuum_cut = 1e-3;
  /// g2 at or below this level is excused as vacuum-like.
  double g2_vacuum_level = 0.01;
  /// Require |Q| <= eps instead of Q >= -eps.
  bool strict_q = false;
  double tol = 1e-12;
  std::size_t max_cutoff = kDefaultMaxCutoff;
  /// Worker threads for sweeps and probes; 0 uses the hardware concurrency.
  unsigned threads = 0;

  /// Throws std::invalid_argument for non-positive or non-finite settings.
  void validate() const;
};

struct ClassicalityVerdict {
  bool s_x_ok = true;
  bool s_p_ok = true;
  bool i_x_ok = true;
  bool i_y_ok = true;
  bool q_ok = true;
  bool g2_ok = true;
  bool a3_ok = true;
  std::optional<bool> wigner_ok;
  std::optional<double> wigner_min;
  bool overall = true;
  CriteriaReport report;
};

/// Flags for an already computed report (Wigner flag left unset).
ClassicalityVerdict verdict_from_report(const CriteriaReport& report, const VerdictConfig& cfg);
/// Throws DomainError for z outside the family's domain.
ClassicalityVerdict classicality_verdict(const Nonlinearity& spec, std::complex<double> z, const VerdictConfig& cfg);

/// Name of the family parameter used in tables: beta, lambda, q or param.
std::string parameter_name(Family family);

struct SweepRow {
  double param = 0.0;
  std::complex<double> z;
  std::optional<CriteriaReport> report;
  std::size_t cutoff = 0;
  std::string error;  // empty on success
};

struct SweepTable {
  Family family = Family::Identity;
  std::vector<double> params;
  std::vector<std::complex<double>> zs;
  std::vector<SweepRow> rows;  // param-major

  [[nodiscard]] std::string to_csv() const;
};

/// Criteria for every (param, z) cell; failing cells become error rows.
SweepTable sweep(Family family, const std::vector<double>& params, const std::vector<std::complex<double>>& zs,
                 const VerdictConfig& cfg);

struct ThresholdResult {
  Family family = Family::Identity;
  std::complex<double> z;
  double threshold = 0.0;
  double eps = 0.0;
  bool non_monotone = false;
  std::vector<std::string> flags;
};

/// Smallest parameter in [lo, hi] where the verdict turns true, to width 0.01.
/// Throws BracketError if the verdict is true at lo or false at hi.
ThresholdResult threshold_parameter(Family family, std::complex<double> z, const VerdictConfig& cfg, double lo,
                                    double hi);

struct RadiusResult {
  double beta = 0.0;
  double radius = 0.0;
  double eps = 0.0;
  bool capped = false;
  std::vector<std::string> flags;
};

inline constexpr double kRadiusCap = 1e14;

/// Largest R such that the verdict holds at z_probe_count real probes in (0, R], to relative width 1e-3.
RadiusResult radius_of_coherence(double beta, const VerdictConfig& cfg, int z_probe_count = 16);

nlohmann::json to_json(const ClassicalityVerdict& v);
nlohmann::json to_json(const SweepTable& t);
nlohmann::json to_json(const ThresholdResult& r);
nlohmann::json to_json(const RadiusResult& r);

CriteriaReport criteria_report_from_json(const nlohmann::json& j);
SweepTable sweep_table_from_json(const nlohmann::json& j);
ThresholdResult threshold_result_from_json(const nlohmann::json& j);
RadiusResult radius_result_from_json(const nlohmann::json& j);

}  // namespace nlcs
