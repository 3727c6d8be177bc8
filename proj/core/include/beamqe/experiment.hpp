#pragma once

// Sweep orchestration: configuration, per-degree records, D calibration and
// report files.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beamqe/point_set.hpp"
#include "beamqe/qe.hpp"
#include "beamqe/superposition.hpp"

namespace beamqe {

/// How the pole set for a given m is obtained.
struct PointPipeline {
  PointKind kind = PointKind::fibonacci;
  std::uint64_t seed = 0;
  /// Path to a point-set file for kind == file; "{m}" is replaced by m.
  std::string file;
  // kind == annealed: fibonacci start, then anneal_declustering.
  std::size_t anneal_iterations = 10000;
  /// Anneal clustering radius in beam widths N^{-1/2}; 0 uses 1/m.
  double anneal_radius_widths = 0.0;
  std::uint64_t anneal_seed = 1;

  bool operator==(const PointPipeline&) const = default;
};

PointSet make_point_set(int N, std::size_t m, const PointPipeline& pipeline);

struct SweepConfig {
  std::vector<int> N_list{64};
  std::optional<double> D = 2.0;  // nullopt: calibrate
  PointPipeline points;
  int quadrature_margin = 4;  // physical rule degree 2N + margin
  std::vector<std::string> observables;  // empty: full bank
  std::string output_dir = "beamqe_out";
  unsigned threads = 0;
  HConvention h_convention = HConvention::inverse_degree;
  bool override_certificate = false;
  bool allow_large_N = false;  // N up to 4096, analytic L^2 only
  std::size_t memory_budget_mb = 4096;
  std::size_t husimi_grid = 4096;
  int sup_oversample = 4;
  int pole_rule_degree = 40;
  double c_floor = 0.5;
  std::size_t C_ceiling = 8;
  double weyl_ceiling = 0.1;
  std::size_t weyl_min_m = 256;
  int calibration_N = 256;
  std::vector<double> calibration_grid{1.0, 1.5, 2.0, 3.0, 4.0};

  bool operator==(const SweepConfig&) const = default;
};

inline constexpr int kDefaultMaxN = 1024;
inline constexpr int kLargeMaxN = 4096;

/// Flat `key = value` text; `#` starts a comment, lists are `[a, b]`.
/// Throws ConfigError on unknown keys or malformed values.
SweepConfig parse_config(const std::string& text);
SweepConfig load_config(const std::string& path);
/// Every field, including defaults; parse_config(config_to_text(c)) == c.
std::string config_to_text(const SweepConfig& config);
/// Throws ConfigError. Requires D when D_required.
void validate(const SweepConfig& config, bool D_required = false);

/// Bytes held while processing degree N: the rule of degree 2N + margin and u on it.
std::size_t predicted_sweep_bytes(int N, int quadrature_margin);

struct DegreeRecord {
  int N = 0;
  std::size_t m = 0;
  double D = 0.0;
  std::string generator;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;
  Certificate certificate;
  bool overridden = false;
  double C_N = 0.0;
  double c0D_proxy = 0.0;
  L2Analytic l2;
  std::optional<double> l2_quadrature;  // integral of |F|^2, compare l2.norm_squared
  SupNormRecord sup;
  double sup_u = 0.0;
  PoleSums pole_sums;  // at sup.argmax
  QEReport qe;
  double seconds = 0.0;  // wall time, excluded from the content hash
};

struct CalibrationRow {
  double D = 0.0;
  bool skipped = false;  // sqrt(N) / D^2 < 1
  std::size_t m = 0;
  bool certified = false;
  double sup_u = 0.0;
  PoleSums pole_sums;
  double tail = 0.0;  // sum_II + sum_III
};

struct CalibrationResult {
  int N_probe = 0;
  double threshold = 0.5;
  double D = 0.0;
  std::vector<CalibrationRow> rows;  // ascending D
  bool monotone = true;             // tails nonincreasing in D
};

/// Smallest D of the grid whose pole-sum tail at the sup argmax is below
/// threshold. Throws ConfigError on an empty grid or when no D qualifies.
CalibrationResult calibrate_D(int N_probe, std::vector<double> D_grid, const SweepConfig& config,
                              double threshold = 0.5);

struct SweepRecord {
  SweepConfig config;
  std::optional<CalibrationResult> calibration;
  std::vector<DegreeRecord> degrees;
  double L = 0.0;      // max sup|u_N|
  double slope = 0.0;  // least squares of log sup|u_N| on log N; 0 for one degree
  double c1 = 0.0;     // max C_N
  std::string created;  // UTC timestamp, excluded from the content hash
};

/// Throws CertificateError, ResourceError or ConfigError.
SweepRecord run_sweep(const SweepConfig& config);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Full-fidelity JSON; without_volatile drops timestamps and timings.
std::string sweep_record_to_json(const SweepRecord& record, bool without_volatile = false);
SweepRecord sweep_record_from_json(const std::string& json);
/// FNV-1a of the JSON without volatile fields.
std::uint64_t content_hash(const SweepRecord& record);

std::string calibration_to_json(const CalibrationResult& result);

/// Writes sweep.json, degrees.csv, defects.csv, summary.txt and config.toml
/// into dir. Throws std::runtime_error if the directory cannot be written.
void emit_report(const SweepRecord& record, const std::string& dir);
SweepRecord read_report(const std::string& dir);
std::string summary_text(const SweepRecord& record);

}  // namespace beamqe
