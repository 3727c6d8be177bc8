// Global maximization of |F| on S^2: an equiangular grid scan with local-max
// detection, followed by coordinate-wise golden-section ascent along geodesics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "beamqe/parallel.hpp"
#include "beamqe/superposition.hpp"

namespace beamqe {

namespace {

constexpr double kPi = std::numbers::pi;

struct GridPeak {
  double value;
  std::size_t row, col;
};

bool peak_before(const GridPeak& a, const GridPeak& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.row != b.row) return a.row < b.row;
  return a.col < b.col;
}

UnitVector along(const UnitVector& x, const Vec3& dir, double t) {
  return UnitVector(std::cos(t) * x.vec() + std::sin(t) * dir);
}

// Maximize g on [-w, w] by golden section; returns (t, g(t)).
template <typename G>
std::pair<double, double> golden_max(const G& g, double w, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -w, b = w;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > tol) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  return gc >= gd ? std::pair{c, gc} : std::pair{d, gd};
}

}  // namespace

SupNormRecord sup_norm(const BeamSuperposition& F, const SupNormOptions& opt) {
  if (opt.oversample < 2) throw std::invalid_argument("sup_norm: oversample must be >= 2");
  const std::size_t per_pi = static_cast<std::size_t>(opt.oversample) * static_cast<std::size_t>(F.degree());
  const double h = kPi / double(per_pi);
  const std::size_t rows = per_pi + 1;
  const std::size_t cols = 2 * per_pi;

  std::vector<double> cos_t(cols), sin_t(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    cos_t[j] = std::cos(double(j) * h);
    sin_t[j] = std::sin(double(j) * h);
  }
  auto row_values = [&](std::size_t i, std::vector<double>& out) {
    const double phi = double(i) * h;
    const double sp = std::sin(phi), cp = std::cos(phi);
    out.resize(cols);
    parallel_for(cols, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        double re = 0.0, im = 0.0;
        const double x = sp * cos_t[j], y = sp * sin_t[j];
        for (const auto& beam : F.beams()) beam.accumulate(x, y, cp, re, im);
        out[j] = std::hypot(re, im);
      }
    });
  };

  // Rolling three-row window; a node is a grid maximum if no neighbour exceeds it.
  std::vector<double> prev, cur, next;
  row_values(0, cur);
  row_values(1, next);
  std::vector<GridPeak> peaks;
  GridPeak best_grid{-1.0, 0, 0};
  for (std::size_t i = 0; i < rows; ++i) {
    const bool pole_row = (i == 0 || i + 1 == rows);
    for (std::size_t j = 0; j < cols; ++j) {
      if (pole_row && j > 0) break;
      const double v = cur[j];
      if (v > best_grid.value) best_grid = {v, i, j};
      bool is_max = true;
      const std::size_t jl = (j + cols - 1) % cols, jr = (j + 1) % cols;
      if (!pole_row && (cur[jl] > v || cur[jr] > v)) is_max = false;
      for (const auto* nb : {&prev, &next}) {
        if (!is_max || nb->empty()) continue;
        if ((*nb)[jl] > v || (*nb)[j] > v || (*nb)[jr] > v) is_max = false;
      }
      if (is_max) {
        peaks.push_back({v, i, j});
        if (peaks.size() > 4 * opt.candidates) {
          std::sort(peaks.begin(), peaks.end(), peak_before);
          peaks.resize(opt.candidates);
        }
      }
    }
    prev.swap(cur);
    cur.swap(next);
    if (i + 2 < rows) {
      row_values(i + 2, next);
    } else {
      next.clear();
    }
  }
  std::sort(peaks.begin(), peaks.end(), peak_before);
  if (peaks.size() > opt.candidates) peaks.resize(opt.candidates);

  auto node = [&](std::size_t i, std::size_t j) {
    return UnitVector::from_spherical(double(i) * h, double(j) * h);
  };
  auto absF = [&](const UnitVector& x) { return std::abs(F(x)); };

  SupNormRecord rec;
  rec.grid_resolution = h;
  rec.grid_points = rows * cols;
  rec.grid_max = best_grid.value;
  rec.argmax = node(best_grid.row, best_grid.col);
  rec.value = absF(rec.argmax);

  if (opt.refine) {
    for (const auto& pk : peaks) {
      UnitVector x = node(pk.row, pk.col);
      double fx = absF(x);
      for (double w = h; w >= opt.min_step; w *= 0.5) {
        const Frame f = frame_for_pole(x);
        for (const Vec3& dir : {f.u.vec(), f.v.vec()}) {
          const auto [t, ft] = golden_max([&](double s) { return absF(along(x, dir, s)); }, w,
                                          std::max(opt.min_step, 1e-3 * w));
          ++rec.refinement_iterations;
          if (ft > fx) {
            x = along(x, dir, t);
            fx = absF(x);
          }
        }
      }
      if (fx > rec.value) {
        rec.value = fx;
        rec.argmax = x;
      }
    }
  }

  // Any point lies within h / sqrt(2) of a node. Along the geodesic to that node F is a
  // trigonometric polynomial of degree N, so Re(conj(phase) F) has zero slope at the maximum
  // and curvature at most N^2 sup|F|.
  const double delta = h / std::sqrt(2.0);
  const double drop = 0.5 * double(F.degree()) * double(F.degree()) * delta * delta;
  if (drop < 1.0) {
    rec.upper_bound = std::max(rec.value, rec.grid_max / (1.0 - drop));
    rec.certified_gap = rec.upper_bound - rec.value;
  } else {
    rec.upper_bound = std::numeric_limits<double>::infinity();
    rec.certified_gap = std::numeric_limits<double>::infinity();
  }
  return rec;
}

}  // namespace beamqe
