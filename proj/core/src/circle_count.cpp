// Great-circle clustering search.
//
// For a pole c, point p_k lies within `radius` of the great circle G_c iff
// |<c, p_k>| <= sin(radius), so each point defines a closed band of poles and
// the clustering count is the depth of the band arrangement at c. Three
// candidate families are combined:
//   (a) a Fibonacci grid of poles;
//   (b) an angular sweep along both boundary circles of every band. The
//       maximum depth of a closed-band arrangement is always attained on some
//       band boundary, so this family covers every circle through a pair of
//       points and, up to rounding at arrangement vertices, the true maximum;
//   (c) hill climbing from the best candidates.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "beamqe/parallel.hpp"
#include "beamqe/point_set.hpp"

namespace beamqe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Candidate {
  std::size_t count = 0;
  UnitVector pole;
  std::size_t order = 0;  // family-local index, for deterministic tie breaks
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.count != b.count) return a.count > b.count;
  return a.order < b.order;
}

struct SoA {
  std::vector<double> x, y, z;
  explicit SoA(std::span<const UnitVector> pts) {
    x.reserve(pts.size());
    y.reserve(pts.size());
    z.reserve(pts.size());
    for (const auto& p : pts) {
      x.push_back(p.x());
      y.push_back(p.y());
      z.push_back(p.z());
    }
  }
  std::size_t count(const Vec3& c, double s) const {
    std::size_t n = 0;
    const std::size_t m = x.size();
    for (std::size_t k = 0; k < m; ++k) {
      const double d = c.x * x[k] + c.y * y[k] + c.z * z[k];
      n += std::abs(d) <= s ? 1 : 0;
    }
    return n;
  }
};

std::vector<UnitVector> fibonacci_grid(std::size_t n) {
  const PointSet grid = generate(PointKind::fibonacci, n);
  return {grid.points().begin(), grid.points().end()};
}

// Maximum-depth segment along the boundary circle <c, p_j> = sigma * s.
// Returns the midpoint pole of the deepest segment.
UnitVector sweep_boundary(std::span<const UnitVector> pts, std::size_t j, double sigma, double s,
                          std::vector<std::pair<double, int>>& events) {
  const Frame f = frame_for_pole(pts[j]);
  // Shrink slightly so band j itself is counted robustly at the result.
  const double s_in = s * (1.0 - 1e-10);
  const double t = std::sqrt(std::max(0.0, 1.0 - s_in * s_in));
  const Vec3 center = sigma * s_in * pts[j].vec();
  auto pole_at = [&](double psi) {
    return UnitVector(center + t * (std::cos(psi) * f.u.vec() + std::sin(psi) * f.v.vec()));
  };

  // Bands covering the whole boundary circle only shift the depth; the
  // returned pole is recounted directly by the caller.
  events.clear();
  auto add_interval = [&](double a, double len) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    const double b = a + len;
    events.emplace_back(a, +1);
    if (b < kTwoPi) {
      events.emplace_back(b, -1);
    } else {
      events.emplace_back(kTwoPi, -1);
      events.emplace_back(0.0, +1);
      events.emplace_back(b - kTwoPi, -1);
    }
  };

  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k == j) continue;
    const double B = sigma * s_in * dot(pts[j], pts[k]);
    const double A1 = t * dot(f.u, pts[k]);
    const double A2 = t * dot(f.v, pts[k]);
    const double R = std::hypot(A1, A2);
    if (R < 1e-14) continue;
    const double lo = (-s - B) / R, hi = (s - B) / R;
    if (hi < -1.0 || lo > 1.0) continue;
    const double psi_k = std::atan2(A2, A1);
    if (lo <= -1.0 && hi >= 1.0) continue;
    const double d_in = std::acos(std::min(hi, 1.0));   // inner edge of |delta|
    const double d_out = std::acos(std::max(lo, -1.0)); // outer edge of |delta|
    if (hi >= 1.0) {
      add_interval(psi_k - d_out, 2.0 * d_out);
    } else if (lo <= -1.0) {
      add_interval(psi_k + d_in, kTwoPi - 2.0 * d_in);
    } else {
      add_interval(psi_k + d_in, d_out - d_in);
      add_interval(psi_k - d_out, d_out - d_in);
    }
  }
  if (events.empty()) return pole_at(0.0);
  // Closed intervals: starts sort before ends at equal angles.
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  });
  int depth = 0, best = -1;
  double best_psi = 0.0;
  for (std::size_t e = 0; e < events.size(); ++e) {
    depth += events[e].second;
    if (events[e].second > 0 && depth > best) {
      best = depth;
      const double next = e + 1 < events.size() ? events[e + 1].first : kTwoPi;
      best_psi = 0.5 * (events[e].first + next);
    }
  }
  return pole_at(best_psi);
}

}  // namespace

CircleCount max_circle_count(const PointSet& ps, double radius, const CircleSearchParams& search) {
  if (!(radius > 0)) throw std::invalid_argument("max_circle_count: radius must be > 0");
  const auto pts = ps.points();
  const std::size_t m = ps.m();
  CircleCount result;
  result.radius = radius;
  if (radius >= kPi / 2) {
    result.count = m;
    result.pole = UnitVector::e3();
    return result;
  }
  const double s = std::sin(radius);
  const SoA soa(pts);

  std::vector<Candidate> pool;

  // (a) grid
  const auto grid_n = static_cast<std::size_t>(std::max(1.0, std::ceil(search.grid_factor * double(m))));
  {
    const auto grid = fibonacci_grid(grid_n);
    std::vector<std::size_t> counts(grid_n);
    parallel_for(grid_n, [&](std::size_t b, std::size_t e) {
      for (std::size_t g = b; g < e; ++g) counts[g] = soa.count(grid[g], s);
    });
    for (std::size_t g = 0; g < grid_n; ++g) pool.push_back({counts[g], grid[g], g});
    result.grid_poles = grid_n;
  }

  // (b) boundary sweep
  if (search.boundary_sweep) {
    const std::size_t circles = 2 * m;
    std::vector<Candidate> swept(circles);
    const std::size_t workers = std::min<std::size_t>(thread_count(), circles);
    const std::size_t chunk = (circles + workers - 1) / workers;
    parallel_for(workers, [&](std::size_t w0, std::size_t w1) {
      std::vector<std::pair<double, int>> events;
      events.reserve(4 * m + 4);
      for (std::size_t w = w0; w < w1; ++w) {
        for (std::size_t c = w * chunk; c < std::min(circles, (w + 1) * chunk); ++c) {
          const std::size_t j = c / 2;
          const double sigma = (c % 2 == 0) ? 1.0 : -1.0;
          const UnitVector pole = sweep_boundary(pts, j, sigma, s, events);
          swept[c] = {soa.count(pole, s), pole, grid_n + c};
        }
      }
    });
    pool.insert(pool.end(), swept.begin(), swept.end());
    result.sweep_circles = circles;
  }

  std::stable_sort(pool.begin(), pool.end(), better);
  Candidate best = pool.front();

  // (c) hill climbing
  if (search.hill_climb) {
    const std::size_t starts = std::min(search.top_k, pool.size());
    result.climb_starts = starts;
    const double step_hi = 1.0 / std::sqrt(double(m));
    const double step_lo = 1e-4 / double(m);
    for (std::size_t i = 0; i < starts; ++i) {
      Candidate cur = pool[i];
      for (double step = step_hi; step >= step_lo; step *= 0.5) {
        bool improved = true;
        while (improved) {
          improved = false;
          const Frame f = frame_for_pole(cur.pole);
          for (int d = 0; d < 8; ++d) {
            const double a = d * kPi / 4.0;
            const Vec3 dir = std::cos(a) * f.u.vec() + std::sin(a) * f.v.vec();
            const UnitVector trial(std::cos(step) * cur.pole.vec() + std::sin(step) * dir);
            const std::size_t n = soa.count(trial, s);
            ++result.climb_evaluations;
            if (n > cur.count) {
              cur.count = n;
              cur.pole = trial;
              improved = true;
            }
          }
        }
      }
      if (cur.count > best.count) best = cur;
    }
  }

  result.count = best.count;
  result.pole = best.pole;
  return result;
}

}  // namespace beamqe
