#include "beamqe/superposition.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "beamqe/errors.hpp"
#include "beamqe/parallel.hpp"

namespace beamqe {

std::size_t choose_m(int N, double D) {
  if (N < 1) throw std::invalid_argument("choose_m: N must be >= 1");
  if (!(D > 0)) throw std::invalid_argument("choose_m: D must be > 0");
  const double target = std::sqrt(double(N)) / (D * D);
  if (target < 1.0) {
    std::ostringstream os;
    os << "choose_m: sqrt(N)/D^2 = " << target << " < 1 for N = " << N << ", D = " << D
       << "; lower D (need D <= N^(1/4) = " << std::pow(double(N), 0.25) << ")";
    throw std::invalid_argument(os.str());
  }
  // Nearest integer to target/2 with halves rounded down, then doubled.
  const double half = target / 2.0;
  const auto k = static_cast<std::size_t>(std::ceil(half - 0.5));
  return std::max<std::size_t>(2, 2 * k);
}

BeamSuperposition::BeamSuperposition(int N, double D, PointSet ps, bool overridden, bool certified)
    : N_(N), D_(D), points_(std::move(ps)), overridden_(overridden), certified_(certified) {
  beams_.reserve(points_.m());
  for (const auto& p : points_.points()) beams_.emplace_back(N, p);
  if (points_.m() >= 2) min_sep_ = beamqe::min_separation(points_).distance;
}

BeamSuperposition BeamSuperposition::build(int N, double D, const PointSet& ps,
                                           const BuildOptions& options) {
  if (N < 1) throw std::invalid_argument("build: N must be >= 1");
  bool certified = false;
  if (!options.override_checks) {
    const std::size_t want = choose_m(N, D);
    if (ps.m() != want) {
      throw std::invalid_argument("build: point set has m = " + std::to_string(ps.m()) +
                                  " but choose_m(N, D) = " + std::to_string(want));
    }
    if (options.certificate == nullptr) {
      throw CertificateError("build: no certificate supplied for the point set");
    }
    if (options.certificate->m != ps.m() || !options.certificate->passed()) {
      throw CertificateError("build: point set certificate did not pass");
    }
    certified = true;
  } else if (options.certificate != nullptr) {
    certified = options.certificate->passed() && options.certificate->m == ps.m();
  }
  return BeamSuperposition(N, D, ps, options.override_checks, certified);
}

std::complex<double> BeamSuperposition::operator()(const UnitVector& x) const {
  std::complex<double> s{0.0, 0.0};
  for (const auto& b : beams_) s += b(x);
  return s;
}

std::vector<std::complex<double>> BeamSuperposition::eval_grid(std::span<const double> xs,
                                                               std::span<const double> ys,
                                                               std::span<const double> zs) const {
  if (xs.size() != ys.size() || xs.size() != zs.size()) {
    throw std::invalid_argument("eval_grid: coordinate arrays differ in length");
  }
  std::vector<std::complex<double>> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double re = 0.0, im = 0.0;
      for (const auto& beam : beams_) beam.accumulate(xs[i], ys[i], zs[i], re, im);
      out[i] = {re, im};
    }
  });
  return out;
}

std::vector<std::complex<double>> BeamSuperposition::eval_grid(std::span<const UnitVector> points) const {
  std::vector<double> xs, ys, zs;
  xs.reserve(points.size());
  ys.reserve(points.size());
  zs.reserve(points.size());
  for (const auto& p : points) {
    xs.push_back(p.x());
    ys.push_back(p.y());
    zs.push_back(p.z());
  }
  return eval_grid(xs, ys, zs);
}

std::vector<std::complex<double>> BeamSuperposition::eval_on(const SphereRule& rule) const {
  return eval_grid(rule.xs(), rule.ys(), rule.zs());
}

L2Analytic l2_norm_analytic(const BeamSuperposition& F) {
  L2Analytic out;
  const auto beams = F.beams();
  const std::size_t m = beams.size();
  out.norm_squared = double(m);
  if (m < 2) return out;

  struct Pair {
    std::size_t j, k;
  };
  std::vector<Pair> todo;
  out.min_beta = std::numbers::pi;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      const double beta = geodesic_distance(beams[j].pole(), beams[k].pole());
      out.min_beta = std::min(out.min_beta, beta);
      const double bound = overlap_bound(F.degree(), beta);
      if (bound < kOverlapPruneBound) {
        ++out.pairs_pruned;
        out.max_pruned_bound = std::max(out.max_pruned_bound, bound);
      } else {
        todo.push_back({j, k});
      }
    }
  }
  out.pairs_computed = todo.size();
  if (todo.empty()) return out;

  const SphereRule rule(2 * F.degree());
  std::vector<double> terms(todo.size());
  for (std::size_t i = 0; i < todo.size(); ++i) {
    const auto z = overlap_numeric(beams[todo[i].j], beams[todo[i].k], rule);
    // <Q_j,Q_k> + <Q_k,Q_j> = 2 Re <Q_j,Q_k>
    terms[i] = 2.0 * z.real();
    out.max_offdiagonal = std::max(out.max_offdiagonal, std::abs(z));
  }
  out.offdiagonal_total = pairwise_sum(terms);
  out.norm_squared = double(m) + out.offdiagonal_total;
  return out;
}

double l2_norm_quadrature(const BeamSuperposition& F, const SphereRule& rule) {
  require_degree(rule, 2 * F.degree(), "l2_norm_quadrature");
  const auto values = F.eval_on(rule);
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = std::norm(values[i]);
  return integrate_tabulated(sq, rule);
}

PoleSums pole_sum_decomposition(const BeamSuperposition& F, const UnitVector& x) {
  PoleSums s;
  const double inv_m = 1.0 / double(F.m());
  const double N = double(F.degree());
  std::vector<double> g1, g2, g3;
  for (const auto& b : F.beams()) {
    const double alpha = std::abs(std::numbers::pi / 2 - geodesic_distance(b.pole(), x));
    const double c = std::cos(alpha);
    const double term = c > 0 ? std::exp(N * std::log(c)) : 0.0;
    if (alpha <= inv_m) {
      g1.push_back(term);
    } else if (alpha <= 1.0 / 3.0) {
      g2.push_back(term);
    } else {
      g3.push_back(term);
    }
  }
  s.count_I = g1.size();
  s.count_II = g2.size();
  s.count_III = g3.size();
  s.sum_I = pairwise_sum(g1);
  s.sum_II = pairwise_sum(g2);
  s.sum_III = pairwise_sum(g3);
  s.total = s.sum_I + s.sum_II + s.sum_III;
  return s;
}

NormalizedHarmonic normalized(const BeamSuperposition& F, const L2Analytic& l2) {
  return NormalizedHarmonic{&F, std::sqrt(l2.norm_squared)};
}

NormalizedHarmonic normalized(const BeamSuperposition& F) { return normalized(F, l2_norm_analytic(F)); }

}  // namespace beamqe
