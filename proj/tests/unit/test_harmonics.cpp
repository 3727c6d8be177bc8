#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beamqe/harmonics.hpp"
#include "beamqe/quadrature.hpp"
#include "random_rotation.hpp"

using namespace beamqe;

namespace {

// Legendre P_l by the Bonnet recurrence.
double legendre(int l, double t) {
  double p0 = 1.0, p1 = t;
  if (l == 0) return p0;
  for (int n = 1; n < l; ++n) {
    const double p2 = ((2.0 * n + 1.0) * t * p1 - n * p0) / (n + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace

TEST(RealHarmonics, LowDegreeClosedForms) {
  const RealHarmonics h(2);
  const UnitVector x(0.3, -0.5, 0.8);
  const auto y = h.evaluate(x);
  const double pi = std::numbers::pi;
  EXPECT_NEAR(y[RealHarmonics::index(0, 0)], 1.0 / std::sqrt(4.0 * pi), 1e-15);
  EXPECT_NEAR(y[RealHarmonics::index(1, 0)], std::sqrt(3.0 / (4.0 * pi)) * x.z(), 1e-15);
  // Condon-Shortley phase is carried by the recurrence.
  EXPECT_NEAR(std::abs(y[RealHarmonics::index(1, 1)]), std::sqrt(3.0 / (4.0 * pi)) * std::abs(x.x()), 1e-15);
  EXPECT_NEAR(std::abs(y[RealHarmonics::index(1, -1)]), std::sqrt(3.0 / (4.0 * pi)) * std::abs(x.y()), 1e-15);
  EXPECT_NEAR(y[RealHarmonics::index(2, 0)], std::sqrt(5.0 / (16.0 * pi)) * (3.0 * x.z() * x.z() - 1.0), 1e-15);
}

TEST(RealHarmonics, AdditionTheorem) {
  const int lmax = 60;
  const RealHarmonics h(lmax);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = beamqe::testing::random_unit(rng), y = beamqe::testing::random_unit(rng);
    const auto yx = h.evaluate(x), yy = h.evaluate(y);
    for (int l = 0; l <= lmax; l += 7) {
      double s = 0.0;
      for (int k = -l; k <= l; ++k) s += yx[RealHarmonics::index(l, k)] * yy[RealHarmonics::index(l, k)];
      const double ref = (2.0 * l + 1.0) / (4.0 * std::numbers::pi) * legendre(l, dot(x, y));
      EXPECT_NEAR(s, ref, 1e-11 * (2.0 * l + 1.0));
    }
  }
}

TEST(RealHarmonics, OrthonormalUnderExactQuadrature) {
  const int lmax = 12;
  const RealHarmonics h(lmax);
  const SphereRule rule(2 * lmax);
  std::vector<std::vector<double>> tab(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) tab[i] = h.evaluate(rule.node(i));
  for (std::size_t a = 0; a < h.size(); ++a) {
    for (std::size_t b = a; b < h.size(); ++b) {
      std::vector<double> f(rule.size());
      for (std::size_t i = 0; i < rule.size(); ++i) f[i] = tab[i][a] * tab[i][b];
      EXPECT_NEAR(integrate_tabulated(f, rule), a == b ? 1.0 : 0.0, 1e-13);
    }
  }
}

TEST(RealHarmonics, StableAtHighDegreeNearThePoles) {
  const RealHarmonics h(1000);
  for (double z : {1.0, 0.999999, -0.9999999999, 0.0}) {
    const UnitVector x(std::sqrt(1.0 - z * z), 0.0, z);
    const auto y = h.evaluate(x);
    for (double v : y) ASSERT_TRUE(std::isfinite(v));
    // Addition theorem at x = y: sum_k Y_lk(x)^2 = (2l+1)/4pi.
    double s = 0.0;
    for (int k = -1000; k <= 1000; ++k) s += y[RealHarmonics::index(1000, k)] * y[RealHarmonics::index(1000, k)];
    EXPECT_NEAR(s, 2001.0 / (4.0 * std::numbers::pi), 1e-11 * s);
  }
}
