#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "beamqe/sphere.hpp"

namespace beamqe::testing {

/// Uniform rotation from a seeded engine: random axis, angle with density (1 - cos)/pi.
inline Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const UnitVector axis(g(rng), g(rng), g(rng));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double angle = 0.0;
  for (;;) {
    angle = std::numbers::pi * u(rng);
    if (u(rng) * 2.0 <= 1.0 - std::cos(angle)) break;
  }
  return Rotation::about_axis(axis, angle);
}

inline UnitVector random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return UnitVector(g(rng), g(rng), g(rng));
}

}  // namespace beamqe::testing
