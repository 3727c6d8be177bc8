#pragma once

// F_N = sum_j Q_j over a pole configuration, its L^2 norm (pairwise overlaps
// and direct quadrature), its sup norm, and the pole-sum bound at a point.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "beamqe/beam.hpp"
#include "beamqe/point_set.hpp"
#include "beamqe/quadrature.hpp"

namespace beamqe {

/// Nearest even integer to sqrt(N) / D^2, exact ties rounded down, at least 2.
/// Throws std::invalid_argument if sqrt(N) / D^2 < 1 (lower D).
std::size_t choose_m(int N, double D);

struct BuildOptions {
  /// A certificate for the point set; build rejects it unless passed().
  const Certificate* certificate = nullptr;
  /// Skip the m = choose_m(N, D) and certificate checks (recorded in provenance).
  bool override_checks = false;
};

class BeamSuperposition {
 public:
  /// Throws std::invalid_argument on an m mismatch and CertificateError on a
  /// missing or failed certificate, unless options.override_checks.
  static BeamSuperposition build(int N, double D, const PointSet& ps, const BuildOptions& options = {});

  int degree() const { return N_; }
  double D() const { return D_; }
  std::size_t m() const { return beams_.size(); }
  std::span<const GaussianBeam> beams() const { return beams_; }
  const PointSet& point_set() const { return points_; }
  bool overridden() const { return overridden_; }
  bool certified() const { return certified_; }
  /// min pole separation and min_separation * N^{1/4} (empirical c0 D); 0 when m = 1.
  double min_separation() const { return min_sep_; }
  double c0D_proxy() const { return min_sep_ * std::pow(double(N_), 0.25); }

  /// Sum of log-domain beam evaluations in index order.
  std::complex<double> operator()(const UnitVector& x) const;

  /// Grid kernel over coordinate arrays; agrees with operator() to ~1e-13 relative.
  std::vector<std::complex<double>> eval_grid(std::span<const double> xs, std::span<const double> ys,
                                              std::span<const double> zs) const;
  std::vector<std::complex<double>> eval_grid(std::span<const UnitVector> points) const;
  /// Values on every node of a sphere rule.
  std::vector<std::complex<double>> eval_on(const SphereRule& rule) const;

 private:
  BeamSuperposition(int N, double D, PointSet ps, bool overridden, bool certified);

  int N_;
  double D_;
  PointSet points_;
  std::vector<GaussianBeam> beams_;
  bool overridden_;
  bool certified_;
  double min_sep_ = 0.0;
};

struct L2Analytic {
  double norm_squared = 0.0;
  double offdiagonal_total = 0.0;  // sum over j != k of <Q_j, Q_k> (real)
  double max_offdiagonal = 0.0;    // max |<Q_j, Q_k>| over computed pairs
  double max_pruned_bound = 0.0;   // largest overlap bound among skipped pairs
  double min_beta = 0.0;           // smallest pole distance
  std::size_t pairs_computed = 0;
  std::size_t pairs_pruned = 0;
};

/// Pairs whose overlap bound falls below this are not integrated.
inline constexpr double kOverlapPruneBound = 1e-16;

/// m + sum_{j != k} <Q_j, Q_k>, each overlap by quadrature of degree 2N.
L2Analytic l2_norm_analytic(const BeamSuperposition& F);

/// Integral of |F|^2 on the rule; requires rule.degree() >= 2N.
double l2_norm_quadrature(const BeamSuperposition& F, const SphereRule& rule);

struct SupNormOptions {
  int oversample = 4;           // grid spacing pi / (oversample N)
  std::size_t candidates = 32;  // grid local maxima handed to refinement
  bool refine = true;
  double min_step = 1e-12;
};

struct SupNormRecord {
  double value = 0.0;
  UnitVector argmax;
  double grid_resolution = 0.0;  // radians
  std::size_t grid_points = 0;
  double grid_max = 0.0;
  std::size_t refinement_iterations = 0;
  /// upper_bound - value, from the degree-N Bernstein bound on second
  /// derivatives along geodesics over the grid spacing; +inf when the grid is
  /// too coarse for the bound to close.
  double certified_gap = 0.0;
  double upper_bound = 0.0;
};

/// Throws std::invalid_argument if oversample < 2.
SupNormRecord sup_norm(const BeamSuperposition& F, const SupNormOptions& options = {});

struct PoleSums {
  double sum_I = 0.0, sum_II = 0.0, sum_III = 0.0, total = 0.0;
  std::size_t count_I = 0, count_II = 0, count_III = 0;
};

/// Partition poles by alpha_j = |pi/2 - dist(p_j, x)| into alpha <= 1/m,
/// 1/m < alpha <= 1/3 and alpha > 1/3; sums of (cos alpha_j)^N per group.
/// A_N * total bounds |F(x)|.
PoleSums pole_sum_decomposition(const BeamSuperposition& F, const UnitVector& x);

/// u_N = F / ||F||_2 with ||F||_2 from the analytic route.
struct NormalizedHarmonic {
  const BeamSuperposition* F = nullptr;
  double l2_norm = 1.0;
  std::complex<double> operator()(const UnitVector& x) const { return (*F)(x) / l2_norm; }
  double sup(const SupNormRecord& sup_F) const { return sup_F.value / l2_norm; }
};

NormalizedHarmonic normalized(const BeamSuperposition& F);
NormalizedHarmonic normalized(const BeamSuperposition& F, const L2Analytic& l2);

}  // namespace beamqe
