#include "beamqe/point_set.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "beamqe/errors.hpp"
#include "beamqe/harmonics.hpp"
#include "beamqe/parallel.hpp"
#include "json.hpp"

namespace beamqe {

namespace {

constexpr double kPi = std::numbers::pi;

// 53-bit uniform in [0, 1); avoids implementation-defined distributions so
// point sets are bit-identical across standard libraries.
double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

std::vector<UnitVector> fibonacci_points(std::size_t m) {
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  std::vector<UnitVector> pts;
  pts.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double z = 1.0 - (2.0 * double(i) + 1.0) / double(m);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = std::fmod(double(i) * golden_angle, 2.0 * kPi);
    pts.emplace_back(Vec3{r * std::cos(th), r * std::sin(th), z});
  }
  return pts;
}

// Generalized spiral points (Rakhmanov, Saff and Zhou).
std::vector<UnitVector> spiral_points(std::size_t m) {
  if (m == 1) return {UnitVector::e3()};
  std::vector<UnitVector> pts;
  pts.reserve(m);
  double theta = 0.0;
  const double step = 3.6 / std::sqrt(double(m));
  for (std::size_t k = 0; k < m; ++k) {
    const double h = -1.0 + 2.0 * double(k) / double(m - 1);
    const double r = std::sqrt(std::max(0.0, 1.0 - h * h));
    if (k == 0 || k == m - 1) {
      theta = 0.0;
    } else {
      theta = std::fmod(theta + step / r, 2.0 * kPi);
    }
    pts.emplace_back(Vec3{r * std::cos(theta), r * std::sin(theta), h});
  }
  return pts;
}

std::vector<UnitVector> uniform_points(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<UnitVector> pts;
  pts.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double z = 2.0 * uniform01(rng) - 1.0;
    const double th = 2.0 * kPi * uniform01(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts.emplace_back(Vec3{r * std::cos(th), r * std::sin(th), z});
  }
  return pts;
}

}  // namespace

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::fibonacci: return "fibonacci";
    case PointKind::spiral: return "spiral";
    case PointKind::uniform_random: return "uniform-random";
    case PointKind::annealed: return "annealed";
    case PointKind::file: return "file";
  }
  return "unknown";
}

PointKind point_kind_from_string(std::string_view tag) {
  for (PointKind k : {PointKind::fibonacci, PointKind::spiral, PointKind::uniform_random,
                      PointKind::annealed, PointKind::file}) {
    if (to_string(k) == tag) return k;
  }
  throw ConfigError("unknown point generator '" + std::string(tag) + "'");
}

PointSet::PointSet(std::vector<UnitVector> points, PointKind generator, std::uint64_t seed)
    : points_(std::move(points)), generator_(generator), seed_(seed) {
  if (points_.empty()) throw std::invalid_argument("PointSet: m must be >= 1");
  std::vector<Vec3> sorted;
  sorted.reserve(points_.size());
  for (const auto& p : points_) sorted.push_back(p.vec());
  auto key = [](const Vec3& v) { return std::array<double, 3>{v.x, v.y, v.z}; };
  std::sort(sorted.begin(), sorted.end(),
            [&](const Vec3& a, const Vec3& b) { return key(a) < key(b); });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("PointSet: duplicate points");
  }
}

std::uint64_t PointSet::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t w) {
    for (int b = 0; b < 8; ++b) {
      h ^= (w >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  };
  mix(points_.size());
  for (const auto& p : points_) {
    mix(std::bit_cast<std::uint64_t>(p.x()));
    mix(std::bit_cast<std::uint64_t>(p.y()));
    mix(std::bit_cast<std::uint64_t>(p.z()));
  }
  return h;
}

PointSet PointSet::rotated(const Rotation& r) const {
  std::vector<UnitVector> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.push_back(r(p));
  return PointSet(std::move(pts), generator_, seed_);
}

PointSet generate(PointKind kind, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("generate: m must be >= 1");
  switch (kind) {
    case PointKind::fibonacci: return PointSet(fibonacci_points(m), kind, seed);
    case PointKind::spiral: return PointSet(spiral_points(m), kind, seed);
    case PointKind::uniform_random: return PointSet(uniform_points(m, seed), kind, seed);
    default: break;
  }
  throw std::invalid_argument("generate: '" + std::string(to_string(kind)) +
                              "' is not a direct generator");
}

Separation min_separation(const PointSet& ps) {
  const std::size_t m = ps.m();
  if (m < 2) throw std::invalid_argument("min_separation: need at least two points");
  const auto pts = ps.points();

  struct Best {
    double dot = -2.0;
    std::size_t i = 0, j = 0;
  };
  const std::size_t rows = m - 1;
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), rows));
  std::vector<Best> partial(workers);
  // Row-blocked partition; block b is reduced in index order, blocks merged in order.
  const std::size_t chunk = (rows + workers - 1) / workers;
  parallel_for(workers, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      Best best;
      const std::size_t r_end = std::min(rows, (b + 1) * chunk);
      for (std::size_t i = b * chunk; i < r_end; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          const double d = dot(pts[i], pts[j]);
          if (d > best.dot) best = {d, i, j};
        }
      }
      partial[b] = best;
    }
  });
  Best best;
  for (const auto& b : partial) {
    if (b.dot > best.dot) best = b;
  }
  return {std::acos(clamp_unit(best.dot)), best.i, best.j};
}

std::size_t count_near_circle(std::span<const UnitVector> points, const UnitVector& pole,
                              double radius) {
  if (radius >= kPi / 2) return points.size();
  const double s = std::sin(radius);
  std::size_t n = 0;
  for (const auto& p : points) n += std::abs(dot(pole, p)) <= s ? 1 : 0;
  return n;
}

std::vector<double> weyl_sums(const PointSet& ps, int lmax) {
  if (lmax < 1) throw std::invalid_argument("weyl_sums: lmax must be >= 1");
  RealHarmonics ylm(lmax);
  const std::size_t m = ps.m();
  const std::size_t nh = ylm.size();
  // values[i * nh + idx]: evaluated in parallel, summed pairwise per harmonic.
  std::vector<double> values(m * nh);
  parallel_for(m, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      ylm.evaluate(ps[i], std::span<double>(values).subspan(i * nh, nh));
    }
  });
  std::vector<double> out(static_cast<std::size_t>(lmax), 0.0);
  std::vector<double> column(m);
  for (int l = 1; l <= lmax; ++l) {
    double worst = 0.0;
    for (int k = -l; k <= l; ++k) {
      const std::size_t idx = RealHarmonics::index(l, k);
      for (std::size_t i = 0; i < m; ++i) column[i] = values[i * nh + idx];
      worst = std::max(worst, std::abs(pairwise_sum(column) / double(m)));
    }
    out[static_cast<std::size_t>(l - 1)] = worst;
  }
  return out;
}

double cap_discrepancy_estimate(const PointSet& ps, std::size_t caps, std::uint64_t seed) {
  const auto centers = uniform_points(caps, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> heights(caps);
  for (auto& h : heights) h = 2.0 * uniform01(rng) - 1.0;
  std::vector<double> disc(caps);
  const auto pts = ps.points();
  parallel_for(caps, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      std::size_t inside = 0;
      for (const auto& p : pts) inside += dot(centers[c], p) >= heights[c] ? 1 : 0;
      const double area_fraction = (1.0 - heights[c]) / 2.0;
      disc[c] = std::abs(double(inside) / double(pts.size()) - area_fraction);
    }
  });
  return caps == 0 ? 0.0 : *std::max_element(disc.begin(), disc.end());
}

Certificate verify(const PointSet& ps, const VerifyThresholds& t) {
  Certificate c;
  c.m = ps.m();
  c.thresholds = t;
  const double radius = t.radius > 0 ? t.radius : 1.0 / double(ps.m());
  c.thresholds.radius = radius;
  if (ps.m() >= 2) {
    c.separation = min_separation(ps);
  } else {
    c.separation = {kPi, 0, 0};
  }
  c.sep_constant = c.separation.distance * std::sqrt(double(ps.m()));
  c.clustering = max_circle_count(ps, radius, t.search);
  c.weyl_sums = weyl_sums(ps, t.lmax);
  c.cap_discrepancy_estimate = cap_discrepancy_estimate(ps, t.caps);

  c.separation_ok = c.sep_constant >= t.c_floor;
  c.clustering_ok = c.clustering.count <= t.C_ceiling;
  c.equidistribution_ok =
      ps.m() < t.weyl_min_m ||
      std::all_of(c.weyl_sums.begin(), c.weyl_sums.end(),
                  [&](double w) { return w <= t.weyl_ceiling; });
  return c;
}

// ---------------------------------------------------------------------------
// Persistence

void write_point_set(std::ostream& os, const PointSet& ps) {
  os << "m=" << ps.m() << " generator=" << to_string(ps.generator()) << " seed=" << ps.seed()
     << '\n';
  char buf[128];
  for (const auto& p : ps.points()) {
    std::snprintf(buf, sizeof buf, "%a %a %a\n", p.x(), p.y(), p.z());
    os << buf;
  }
}

PointSet read_point_set(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("point set: missing header line");
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::string tag;
  {
    std::istringstream hs(header);
    std::string field;
    bool have_m = false, have_gen = false, have_seed = false;
    while (hs >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw ConfigError("point set: bad header field '" + field + "'");
      const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
      try {
        if (key == "m") {
          m = std::stoull(value);
          have_m = true;
        } else if (key == "generator") {
          tag = value;
          have_gen = true;
        } else if (key == "seed") {
          seed = std::stoull(value);
          have_seed = true;
        } else {
          throw ConfigError("point set: unknown header key '" + key + "'");
        }
      } catch (const std::logic_error&) {
        throw ConfigError("point set: bad header value '" + field + "'");
      }
    }
    if (!have_m || !have_gen || !have_seed) {
      throw ConfigError("point set: header must carry m, generator and seed");
    }
  }
  const PointKind kind = point_kind_from_string(tag);
  std::vector<UnitVector> pts;
  pts.reserve(m);
  std::string line;
  while (pts.size() < m && std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const char* s = line.c_str();
    char* end = nullptr;
    double v[3];
    for (double& x : v) {
      x = std::strtod(s, &end);
      if (end == s) throw ConfigError("point set: malformed coordinate line '" + line + "'");
      s = end;
    }
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(std::abs(n - 1.0) <= 1e-12)) {
      throw ConfigError("point set: coordinate line is not a unit vector: '" + line + "'");
    }
    // Keep the stored bits so files round-trip exactly.
    pts.push_back(UnitVector::from_normalized(Vec3{v[0], v[1], v[2]}));
  }
  if (pts.size() != m) throw ConfigError("point set: expected " + std::to_string(m) + " points");
  try {
    return PointSet(std::move(pts), kind, seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("point set: ") + e.what());
  }
}

void save_point_set(const std::string& path, const PointSet& ps) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  write_point_set(os, ps);
  if (!os) throw ConfigError("write failed for '" + path + "'");
}

PointSet load_point_set(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read '" + path + "'");
  return read_point_set(is);
}

std::string certificate_to_json(const Certificate& c) {
  nlohmann::ordered_json j;
  j["m"] = c.m;
  j["min_separation"] = c.separation.distance;
  j["min_separation_i"] = c.separation.i;
  j["min_separation_j"] = c.separation.j;
  j["sep_constant"] = c.sep_constant;
  j["max_circle_count"] = c.clustering.count;
  j["worst_pole_x"] = c.clustering.pole.x();
  j["worst_pole_y"] = c.clustering.pole.y();
  j["worst_pole_z"] = c.clustering.pole.z();
  j["circle_radius"] = c.clustering.radius;
  j["circle_count_heuristic"] = c.clustering.heuristic;
  j["search_grid_poles"] = c.clustering.grid_poles;
  j["search_sweep_circles"] = c.clustering.sweep_circles;
  j["search_climb_starts"] = c.clustering.climb_starts;
  j["search_climb_evaluations"] = c.clustering.climb_evaluations;
  j["search_grid_factor"] = c.thresholds.search.grid_factor;
  j["search_top_k"] = c.thresholds.search.top_k;
  j["weyl_lmax"] = c.thresholds.lmax;
  j["weyl_sums"] = c.weyl_sums;
  j["cap_discrepancy_estimate"] = c.cap_discrepancy_estimate;
  j["cap_count"] = c.thresholds.caps;
  j["c_floor"] = c.thresholds.c_floor;
  j["C_ceiling"] = c.thresholds.C_ceiling;
  j["weyl_ceiling"] = c.thresholds.weyl_ceiling;
  j["weyl_min_m"] = c.thresholds.weyl_min_m;
  j["separation_ok"] = c.separation_ok;
  j["clustering_ok"] = c.clustering_ok;
  j["equidistribution_ok"] = c.equidistribution_ok;
  j["passed"] = c.passed();
  return j.dump(2);
}

Certificate certificate_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Certificate c;
    c.m = j.at("m").get<std::size_t>();
    c.separation = {j.at("min_separation").get<double>(), j.at("min_separation_i").get<std::size_t>(),
                    j.at("min_separation_j").get<std::size_t>()};
    c.sep_constant = j.at("sep_constant").get<double>();
    c.clustering.count = j.at("max_circle_count").get<std::size_t>();
    c.clustering.pole = UnitVector::from_normalized(Vec3{j.at("worst_pole_x").get<double>(),
                                                         j.at("worst_pole_y").get<double>(),
                                                         j.at("worst_pole_z").get<double>()});
    c.clustering.radius = j.at("circle_radius").get<double>();
    c.clustering.heuristic = j.at("circle_count_heuristic").get<bool>();
    c.clustering.grid_poles = j.at("search_grid_poles").get<std::size_t>();
    c.clustering.sweep_circles = j.at("search_sweep_circles").get<std::size_t>();
    c.clustering.climb_starts = j.at("search_climb_starts").get<std::size_t>();
    c.clustering.climb_evaluations = j.at("search_climb_evaluations").get<std::size_t>();
    c.thresholds.search.grid_factor = j.at("search_grid_factor").get<double>();
    c.thresholds.search.top_k = j.at("search_top_k").get<std::size_t>();
    c.thresholds.lmax = j.at("weyl_lmax").get<int>();
    c.weyl_sums = j.at("weyl_sums").get<std::vector<double>>();
    c.cap_discrepancy_estimate = j.at("cap_discrepancy_estimate").get<double>();
    c.thresholds.caps = j.at("cap_count").get<std::size_t>();
    c.thresholds.c_floor = j.at("c_floor").get<double>();
    c.thresholds.C_ceiling = j.at("C_ceiling").get<std::size_t>();
    c.thresholds.weyl_ceiling = j.at("weyl_ceiling").get<double>();
    c.thresholds.weyl_min_m = j.at("weyl_min_m").get<std::size_t>();
    c.thresholds.radius = c.clustering.radius;
    c.separation_ok = j.at("separation_ok").get<bool>();
    c.clustering_ok = j.at("clustering_ok").get<bool>();
    c.equidistribution_ok = j.at("equidistribution_ok").get<bool>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("certificate JSON: ") + e.what());
  }
}

}  // namespace beamqe
