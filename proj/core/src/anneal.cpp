#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "beamqe/point_set.hpp"

namespace beamqe {

namespace {

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// Box-Muller on the portable uniform; one variate per call keeps the stream simple.
double normal01(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct GridCounter {
  std::vector<UnitVector> grid;
  std::vector<int> counts;
  double s;

  GridCounter(std::span<const UnitVector> pts, double radius, double grid_factor)
      : s(std::sin(std::min(radius, std::numbers::pi / 2))) {
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(grid_factor * double(pts.size()))));
    const PointSet g = generate(PointKind::fibonacci, n);
    grid.assign(g.points().begin(), g.points().end());
    counts.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& p : pts) counts[i] += near(grid[i], p);
    }
  }

  int near(const UnitVector& pole, const UnitVector& p) const {
    return std::abs(dot(pole, p)) <= s ? 1 : 0;
  }

  static double objective(const std::vector<int>& c) {
    const int mx = *std::max_element(c.begin(), c.end());
    const auto ties = std::count(c.begin(), c.end(), mx);
    return double(mx) + double(ties) / double(c.size() + 1);
  }
};

}  // namespace

double clustering_objective(const PointSet& ps, double radius, double grid_factor) {
  const GridCounter gc(ps.points(), radius > 0 ? radius : 1.0 / double(ps.m()), grid_factor);
  return GridCounter::objective(gc.counts);
}

AnnealResult anneal_declustering(const PointSet& ps, const AnnealParams& params) {
  const std::size_t m = ps.m();
  const double floor = params.min_sep_floor > 0 ? params.min_sep_floor : 0.5 / std::sqrt(double(m));
  const double radius = params.radius > 0 ? params.radius : 1.0 / double(m);
  const double scale0 = params.scale_start > 0 ? params.scale_start : 0.3 / std::sqrt(double(m));
  if (m >= 2 && min_separation(ps).distance < floor) {
    throw std::invalid_argument("anneal_declustering: input violates the separation floor");
  }

  std::vector<UnitVector> cur(ps.points().begin(), ps.points().end());
  GridCounter gc(cur, radius, params.grid_factor);
  double cur_obj = GridCounter::objective(gc.counts);

  AnnealResult out{PointSet(cur, PointKind::annealed, params.seed), cur_obj, cur_obj, 0, 0, {}};
  std::vector<UnitVector> best = cur;
  out.best_trace.reserve(params.iterations);

  std::mt19937_64 rng(params.seed);
  std::vector<int> trial_counts(gc.counts.size());
  const double n_iter = double(std::max<std::size_t>(1, params.iterations - 1));
  for (std::size_t it = 0; it < params.iterations; ++it) {
    const double frac = double(it) / n_iter;
    const double temp = params.t_start * std::pow(params.t_end / params.t_start, frac);
    const double scale = scale0 * std::pow(params.scale_end_ratio, frac);

    const std::size_t j = static_cast<std::size_t>(uniform01(rng) * double(m));
    const Frame f = frame_for_pole(cur[j]);
    const double g1 = normal01(rng), g2 = normal01(rng);
    const UnitVector q(cur[j].vec() + scale * (g1 * f.u.vec() + g2 * f.v.vec()));
    const double u = uniform01(rng);

    bool ok = true;
    for (std::size_t k = 0; k < m && ok; ++k) {
      if (k != j && geodesic_distance(q, cur[k]) < floor) ok = false;
    }
    if (!ok) {
      ++out.rejected_floor;
      out.best_trace.push_back(out.best_objective);
      continue;
    }
    for (std::size_t g = 0; g < gc.grid.size(); ++g) {
      trial_counts[g] = gc.counts[g] - gc.near(gc.grid[g], cur[j]) + gc.near(gc.grid[g], q);
    }
    const double obj = GridCounter::objective(trial_counts);
    const double delta = obj - cur_obj;
    if (delta <= 0 || u < std::exp(-delta / temp)) {
      cur[j] = q;
      gc.counts.swap(trial_counts);
      cur_obj = obj;
      ++out.accepted;
      if (obj < out.best_objective) {
        out.best_objective = obj;
        best = cur;
      }
    }
    out.best_trace.push_back(out.best_objective);
  }
  out.best = PointSet(std::move(best), params.iterations == 0 ? ps.generator() : PointKind::annealed,
                      params.iterations == 0 ? ps.seed() : params.seed);

  // The objective only sees the grid; the full search must not get worse.
  if (out.best_objective < out.initial_objective) {
    CircleSearchParams search;
    search.grid_factor = params.grid_factor;
    out.initial_count = max_circle_count(ps, radius, search).count;
    out.best_count = max_circle_count(out.best, radius, search).count;
    if (out.best_count > out.initial_count) {
      out.best = ps;
      out.best_count = out.initial_count;
      out.reverted = true;
    }
  }
  return out;
}

}  // namespace beamqe
