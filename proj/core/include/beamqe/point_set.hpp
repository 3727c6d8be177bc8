#pragma once

// Pole configurations on S^2 and the three numerical verifiers used to
// certify them: pairwise separation, clustering around great circles, and
// equidistribution through Weyl sums.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beamqe/sphere.hpp"

namespace beamqe {

enum class PointKind { fibonacci, spiral, uniform_random, annealed, file };

std::string_view to_string(PointKind kind);
/// Throws ConfigError on an unknown tag.
PointKind point_kind_from_string(std::string_view tag);

/// m distinct unit vectors plus the provenance needed to regenerate them.
class PointSet {
 public:
  /// Throws std::invalid_argument if `points` is empty or contains duplicates.
  PointSet(std::vector<UnitVector> points, PointKind generator, std::uint64_t seed);

  std::size_t m() const { return points_.size(); }
  std::span<const UnitVector> points() const { return points_; }
  const UnitVector& operator[](std::size_t i) const { return points_[i]; }
  PointKind generator() const { return generator_; }
  std::uint64_t seed() const { return seed_; }

  /// FNV-1a over the raw coordinate bits; identical points give identical hashes.
  std::uint64_t fingerprint() const;

  PointSet rotated(const Rotation& r) const;

 private:
  std::vector<UnitVector> points_;
  PointKind generator_;
  std::uint64_t seed_;
};

/// Deterministic in (kind, m, seed). kind must be fibonacci, spiral or uniform_random.
PointSet generate(PointKind kind, std::size_t m, std::uint64_t seed = 0);

struct Separation {
  double distance = 0.0;  // radians
  std::size_t i = 0, j = 0;
};

/// Exact O(m^2) minimum pairwise geodesic distance; ties go to the smallest (i, j).
Separation min_separation(const PointSet& ps);

/// Number of points within `radius` of the great circle with the given pole.
std::size_t count_near_circle(std::span<const UnitVector> points, const UnitVector& pole,
                              double radius);

struct CircleSearchParams {
  double grid_factor = 100.0;  // grid of grid_factor * m Fibonacci poles
  std::size_t top_k = 20;      // hill-climb starts
  bool boundary_sweep = true;  // angular sweep along every band boundary
  bool hill_climb = true;
};

struct CircleCount {
  std::size_t count = 0;
  UnitVector pole;
  double radius = 0.0;
  // Search budget, recorded so certificates are comparable.
  std::size_t grid_poles = 0;
  std::size_t sweep_circles = 0;
  std::size_t climb_starts = 0;
  std::size_t climb_evaluations = 0;
  bool heuristic = true;
};

/// Best lower bound found for max over great circles G of #{j : dist(G, p_j) <= radius}.
CircleCount max_circle_count(const PointSet& ps, double radius,
                             const CircleSearchParams& search = {});

/// max over k of |m^-1 sum_j Y_l^k(p_j)| for l = 1..lmax (element l-1).
std::vector<double> weyl_sums(const PointSet& ps, int lmax);

/// Monte-Carlo estimate of the spherical-cap discrepancy over `caps` random caps.
double cap_discrepancy_estimate(const PointSet& ps, std::size_t caps = 10000,
                                std::uint64_t seed = 0x5eed);

struct AnnealParams {
  std::size_t iterations = 10000;
  double t_start = 1.0;
  double t_end = 0.01;
  double scale_start = 0.0;  // 0 means 0.3 / sqrt(m)
  double scale_end_ratio = 0.01;
  double min_sep_floor = 0.0;  // radians; 0 means 0.5 / sqrt(m)
  double radius = 0.0;         // clustering radius; 0 means 1 / m
  double grid_factor = 100.0;
  std::uint64_t seed = 1;
};

struct AnnealResult {
  PointSet best;
  double initial_objective = 0.0;
  double best_objective = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected_floor = 0;
  /// Best-seen objective after each iteration (non-increasing).
  std::vector<double> best_trace;
  /// Full-search circle counts before and after, filled when the grid objective improved.
  std::size_t initial_count = 0;
  std::size_t best_count = 0;
  /// The annealed set raised the full-search count, so the input was returned.
  bool reverted = false;
};

/// Grid-only clustering objective: max count plus (#poles attaining it)/(M+1).
double clustering_objective(const PointSet& ps, double radius, double grid_factor);

/// Metropolis search on clustering_objective with tangent perturbations and a
/// hard separation floor. Throws std::invalid_argument if the input already
/// violates the floor.
AnnealResult anneal_declustering(const PointSet& ps, const AnnealParams& params = {});

struct VerifyThresholds {
  double c_floor = 0.5;
  std::size_t C_ceiling = 8;
  double weyl_ceiling = 0.1;
  std::size_t weyl_min_m = 256;  // Weyl ceiling only enforced from this size up
  int lmax = 20;
  double radius = 0.0;  // 0 means 1 / m
  CircleSearchParams search;
  std::size_t caps = 10000;
};

struct Certificate {
  std::size_t m = 0;
  Separation separation;
  double sep_constant = 0.0;  // min_separation * sqrt(m)
  CircleCount clustering;
  std::vector<double> weyl_sums;
  double cap_discrepancy_estimate = 0.0;
  VerifyThresholds thresholds;
  bool separation_ok = false;
  bool clustering_ok = false;
  bool equidistribution_ok = false;
  bool passed() const { return separation_ok && clustering_ok && equidistribution_ok; }
};

Certificate verify(const PointSet& ps, const VerifyThresholds& thresholds = {});

// Text format: header `m=<int> generator=<tag> seed=<int>` then m lines of
// `x1 x2 x3`. Written as hexadecimal floats; decimal input is also accepted.
void write_point_set(std::ostream& os, const PointSet& ps);
PointSet read_point_set(std::istream& is);
void save_point_set(const std::string& path, const PointSet& ps);
PointSet load_point_set(const std::string& path);

/// Flat JSON object.
std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& json);

}  // namespace beamqe
