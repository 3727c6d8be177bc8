#pragma once

// Quantum-ergodicity diagnostics for u_N = F_N / ||F_N||.
//
// Matrix elements of a semiclassical quantization are not formed. The
// diagonal terms are represented by great-circle averages over the beam
// circles, compared with the Liouville average; the off-diagonal terms by
// the size of the pairwise beam overlaps.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "beamqe/point_set.hpp"
#include "beamqe/quadrature.hpp"
#include "beamqe/superposition.hpp"

namespace beamqe {

enum class HConvention { inverse_degree, inverse_sqrt_eigenvalue };

/// 1/N, or 1/sqrt(N(N+1)).
double semiclassical_h(int N, HConvention convention = HConvention::inverse_degree);

/// Integral of a |u|^2 over S^2 for a position observable. Requires
/// rule.degree() >= 2N + a.degree() (RuleTooCoarse) and a position observable.
double physical_matrix_element(const NormalizedHarmonic& u, const Observable& a, const SphereRule& rule);

/// Same, reusing u tabulated on the rule nodes.
double physical_matrix_element(std::span<const std::complex<double>> u_on_rule, int N,
                               const Observable& a, const SphereRule& rule);

/// (1/4pi) integral of a dA.
double sphere_mean(const Observable& a, const SphereRule& rule);

/// Mean over the circles of the given frames of circle_average.
double circle_average_sum(std::span<const Frame> circles, const Observable& a, std::size_t n_circle);
/// Over the beam circles of F; n_circle = 0 means 4N + 4.
double circle_average_sum(const BeamSuperposition& F, const Observable& a, std::size_t n_circle = 0);
/// Over the oriented circles with the given poles (frame_for_pole convention).
double circle_average_sum(const PointSet& poles, const Observable& a, std::size_t n_circle = 256);

/// |circle_average_sum - liouville_average|.
double qe_defect(const BeamSuperposition& F, const Observable& a, const SphereRule& pole_rule,
                 std::size_t n_circle = 0);
double qe_defect(const PointSet& poles, const Observable& a, const SphereRule& pole_rule,
                 std::size_t n_circle = 256);

struct OverlapEntry {
  std::size_t j = 0, k = 0;
  double beta = 0.0;
  double magnitude = 0.0;
  double bound = 0.0;
};

struct OffdiagonalScan {
  double max_numeric = 0.0;       // over integrated pairs
  double max_pruned_bound = 0.0;  // over pairs skipped because bound < 1e-16
  std::size_t pairs_computed = 0;
  std::size_t pairs_pruned = 0;
  std::vector<OverlapEntry> table;  // integrated pairs with magnitude above 1e-16
  /// Upper bound on max_{j != k} |<Q_j, Q_k>|.
  double max_upper() const { return std::max(max_numeric, max_pruned_bound); }
};

OffdiagonalScan offdiagonal_scan(int N, const PointSet& ps);

/// |<u, Q_q>|^2 for every pole q of the grid, by quadrature of degree 2N.
std::vector<double> husimi_density(const NormalizedHarmonic& u, int N, const PointSet& pole_grid);

struct HusimiSummary {
  std::size_t grid_size = 0;
  double normalization = 0.0;  // (2N + 1) / (4 pi): makes the density integrate to 1
  double min = 0.0, max = 0.0, mean = 0.0;
};
HusimiSummary summarize_husimi(const std::vector<double>& density, int N);

struct ObservableRecord {
  std::string name;
  bool position_only = false;
  std::optional<double> physical_element;  // position observables with a rule
  std::optional<double> sphere_mean;
  double circle_average_sum = 0.0;
  double liouville_value = 0.0;
  double defect = 0.0;
};

struct QEReport {
  int N = 0;
  double D = 0.0;
  std::size_t m = 0;
  double h = 0.0;
  std::vector<ObservableRecord> observables;
  double offdiag_max = 0.0;  // OffdiagonalScan::max_upper
  double offdiag_max_numeric = 0.0;
  double offdiag_max_pruned_bound = 0.0;
  std::size_t offdiag_pairs_computed = 0;
  std::size_t offdiag_pairs_pruned = 0;
  std::optional<HusimiSummary> husimi;
};

struct QEOptions {
  int pole_rule_degree = 40;
  std::size_t n_circle = 0;  // 0 means 4N + 4
  HConvention h_convention = HConvention::inverse_degree;
  /// Rule for physical matrix elements; none skips them.
  const SphereRule* physical_rule = nullptr;
  /// u tabulated on physical_rule, if already available.
  const std::vector<std::complex<double>>* u_on_rule = nullptr;
  std::size_t husimi_grid = 4096;  // 0 skips the Husimi density
};

QEReport qe_report(const BeamSuperposition& F, const NormalizedHarmonic& u,
                   const std::vector<Observable>& bank, const QEOptions& options = {});

std::string qe_report_to_json(const QEReport& report);

}  // namespace beamqe
