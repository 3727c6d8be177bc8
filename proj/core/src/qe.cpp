#include "beamqe/qe.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "beamqe/parallel.hpp"

namespace beamqe {

namespace {
constexpr double kPi = std::numbers::pi;
}

double semiclassical_h(int N, HConvention convention) {
  if (N < 1) throw std::invalid_argument("semiclassical_h: N must be >= 1");
  return convention == HConvention::inverse_degree ? 1.0 / double(N)
                                                   : 1.0 / std::sqrt(double(N) * (double(N) + 1.0));
}

double physical_matrix_element(std::span<const std::complex<double>> u_on_rule, int N,
                               const Observable& a, const SphereRule& rule) {
  if (!a.is_position()) {
    throw std::invalid_argument("physical_matrix_element: '" + a.name() + "' is not position-only");
  }
  require_degree(rule, 2 * N + a.degree(), "physical_matrix_element");
  if (u_on_rule.size() != rule.size()) {
    throw std::invalid_argument("physical_matrix_element: tabulated values do not match the rule");
  }
  std::vector<double> f(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) f[i] = a(rule.node(i)) * std::norm(u_on_rule[i]);
  return integrate_tabulated(f, rule);
}

double physical_matrix_element(const NormalizedHarmonic& u, const Observable& a, const SphereRule& rule) {
  require_degree(rule, 2 * u.F->degree() + a.degree(), "physical_matrix_element");
  auto values = u.F->eval_on(rule);
  for (auto& v : values) v /= u.l2_norm;
  return physical_matrix_element(values, u.F->degree(), a, rule);
}

double sphere_mean(const Observable& a, const SphereRule& rule) {
  return integrate_sphere([&](const UnitVector& x) { return a(x); }, rule) / (4.0 * kPi);
}

double circle_average_sum(std::span<const Frame> circles, const Observable& a, std::size_t n_circle) {
  std::vector<double> avgs(circles.size());
  for (std::size_t j = 0; j < circles.size(); ++j) {
    avgs[j] = circle_average(OrientedGreatCircle(circles[j]), a, n_circle);
  }
  return pairwise_sum(avgs) / double(circles.size());
}

double circle_average_sum(const BeamSuperposition& F, const Observable& a, std::size_t n_circle) {
  std::vector<Frame> frames;
  frames.reserve(F.m());
  for (const auto& b : F.beams()) frames.push_back(b.frame());
  const std::size_t n = n_circle > 0 ? n_circle : 4 * static_cast<std::size_t>(F.degree()) + 4;
  return circle_average_sum(frames, a, n);
}

double circle_average_sum(const PointSet& poles, const Observable& a, std::size_t n_circle) {
  std::vector<Frame> frames;
  frames.reserve(poles.m());
  for (const auto& p : poles.points()) frames.push_back(frame_for_pole(p));
  return circle_average_sum(frames, a, n_circle);
}

double qe_defect(const BeamSuperposition& F, const Observable& a, const SphereRule& pole_rule,
                 std::size_t n_circle) {
  const std::size_t n = n_circle > 0 ? n_circle : 4 * static_cast<std::size_t>(F.degree()) + 4;
  return std::abs(circle_average_sum(F, a, n) - liouville_average(a, pole_rule, n));
}

double qe_defect(const PointSet& poles, const Observable& a, const SphereRule& pole_rule,
                 std::size_t n_circle) {
  return std::abs(circle_average_sum(poles, a, n_circle) - liouville_average(a, pole_rule, n_circle));
}

OffdiagonalScan offdiagonal_scan(int N, const PointSet& ps) {
  OffdiagonalScan scan;
  std::vector<GaussianBeam> beams;
  beams.reserve(ps.m());
  for (const auto& p : ps.points()) beams.emplace_back(N, p);
  std::optional<SphereRule> rule;
  for (std::size_t j = 0; j < beams.size(); ++j) {
    for (std::size_t k = j + 1; k < beams.size(); ++k) {
      const double beta = geodesic_distance(beams[j].pole(), beams[k].pole());
      const double bound = overlap_bound(N, beta);
      if (bound < kOverlapPruneBound) {
        ++scan.pairs_pruned;
        scan.max_pruned_bound = std::max(scan.max_pruned_bound, bound);
        continue;
      }
      if (!rule) rule.emplace(2 * N);
      const double mag = std::abs(overlap_numeric(beams[j], beams[k], *rule));
      ++scan.pairs_computed;
      scan.max_numeric = std::max(scan.max_numeric, mag);
      if (mag > kOverlapPruneBound) scan.table.push_back({j, k, beta, mag, bound});
    }
  }
  return scan;
}

std::vector<double> husimi_density(const NormalizedHarmonic& u, int N, const PointSet& pole_grid) {
  if (u.F->degree() != N) throw std::invalid_argument("husimi_density: degree mismatch");
  const SphereRule rule(2 * N);
  const auto uvals = u.F->eval_on(rule);
  const auto xs = rule.xs(), ys = rule.ys(), zs = rule.zs(), ws = rule.weights();
  std::vector<double> out(pole_grid.m());
  parallel_for(pole_grid.m(), [&](std::size_t b, std::size_t e) {
    std::vector<std::complex<double>> terms(rule.size());
    for (std::size_t g = b; g < e; ++g) {
      const GaussianBeam q(N, pole_grid[g]);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        double qr = 0.0, qi = 0.0;
        q.accumulate(xs[i], ys[i], zs[i], qr, qi);
        // u * conj(Q_q)
        terms[i] = ws[i] * uvals[i] * std::complex<double>(qr, -qi);
      }
      out[g] = std::norm(pairwise_sum(terms) / u.l2_norm);
    }
  });
  return out;
}

HusimiSummary summarize_husimi(const std::vector<double>& density, int N) {
  HusimiSummary s;
  s.grid_size = density.size();
  s.normalization = (2.0 * N + 1.0) / (4.0 * kPi);
  if (density.empty()) return s;
  s.min = *std::min_element(density.begin(), density.end()) * s.normalization;
  s.max = *std::max_element(density.begin(), density.end()) * s.normalization;
  s.mean = pairwise_sum(density) / double(density.size()) * s.normalization;
  return s;
}

QEReport qe_report(const BeamSuperposition& F, const NormalizedHarmonic& u,
                   const std::vector<Observable>& bank, const QEOptions& opt) {
  QEReport r;
  r.N = F.degree();
  r.D = F.D();
  r.m = F.m();
  r.h = semiclassical_h(F.degree(), opt.h_convention);
  const SphereRule pole_rule(opt.pole_rule_degree);
  const std::size_t n_circle = opt.n_circle > 0 ? opt.n_circle : 4 * static_cast<std::size_t>(F.degree()) + 4;

  std::vector<std::complex<double>> tabulated;
  const std::vector<std::complex<double>>* u_on_rule = opt.u_on_rule;
  if (opt.physical_rule != nullptr && u_on_rule == nullptr) {
    tabulated = F.eval_on(*opt.physical_rule);
    for (auto& v : tabulated) v /= u.l2_norm;
    u_on_rule = &tabulated;
  }

  for (const auto& a : bank) {
    ObservableRecord rec;
    rec.name = a.name();
    rec.position_only = a.is_position();
    rec.circle_average_sum = circle_average_sum(F, a, n_circle);
    rec.liouville_value = liouville_average(a, pole_rule, n_circle);
    rec.defect = std::abs(rec.circle_average_sum - rec.liouville_value);
    if (a.is_position() && opt.physical_rule != nullptr &&
        opt.physical_rule->degree() >= 2 * F.degree() + a.degree()) {
      rec.physical_element = physical_matrix_element(*u_on_rule, F.degree(), a, *opt.physical_rule);
      rec.sphere_mean = sphere_mean(a, *opt.physical_rule);
    }
    r.observables.push_back(std::move(rec));
  }
  const OffdiagonalScan scan = offdiagonal_scan(F.degree(), F.point_set());
  r.offdiag_max = scan.max_upper();
  r.offdiag_max_numeric = scan.max_numeric;
  r.offdiag_max_pruned_bound = scan.max_pruned_bound;
  r.offdiag_pairs_computed = scan.pairs_computed;
  r.offdiag_pairs_pruned = scan.pairs_pruned;
  if (opt.husimi_grid > 0) {
    const PointSet grid = generate(PointKind::fibonacci, opt.husimi_grid);
    r.husimi = summarize_husimi(husimi_density(u, F.degree(), grid), F.degree());
  }
  return r;
}

}  // namespace beamqe
