#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beamqe/errors.hpp"
#include "beamqe/harmonics.hpp"
#include "beamqe/quadrature.hpp"
#include "random_rotation.hpp"

using namespace beamqe;

namespace {

constexpr double kPi = std::numbers::pi;

// 2 pi * integral_{-1}^{1} (1 - t^2)^N dt by the Wallis recursion.
double wallis_sin_power(int N) {
  double I = 2.0;
  for (int k = 1; k <= N; ++k) I *= 2.0 * k / (2.0 * k + 1.0);
  return 2.0 * kPi * I;
}

}  // namespace

TEST(GaussLegendre, WeightsAndExactness) {
  for (std::size_t n : {1u, 2u, 5u, 20u, 101u, 600u}) {
    const auto gl = gauss_legendre(n);
    ASSERT_EQ(gl.nodes.size(), n);
    double w = 0.0;
    for (double x : gl.weights) w += x;
    EXPECT_NEAR(w, 2.0, 1e-13) << n;
    for (std::size_t i = 1; i < n; ++i) EXPECT_LT(gl.nodes[i - 1], gl.nodes[i]);
    // integral of t^(2n-2) is 2/(2n-1).
    const int deg = 2 * int(n) - 2;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += gl.weights[i] * std::pow(gl.nodes[i], deg);
    EXPECT_NEAR(s, 2.0 / (deg + 1.0), 1e-13) << n;
  }
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
}

TEST(SphereRule, Shape) {
  const SphereRule r(7);
  EXPECT_EQ(r.n_phi(), 4u);
  EXPECT_EQ(r.n_theta(), 8u);
  EXPECT_EQ(r.size(), 32u);
  EXPECT_THROW(SphereRule(-1), std::invalid_argument);
}

TEST(SphereRule, ConstantAndSecondMoment) {
  const SphereRule r0(0);
  EXPECT_NEAR(integrate_sphere([](const UnitVector&) { return 1.0; }, r0), 4.0 * kPi, 1e-12);
  const SphereRule r2(2);
  EXPECT_NEAR(integrate_sphere([](const UnitVector& x) { return x.z() * x.z(); }, r2), 4.0 * kPi / 3.0, 1e-13);
}

TEST(SphereRule, SinPowerMatchesWallisAndLogGamma) {
  for (int N : {1, 10, 100}) {
    const SphereRule r(2 * N);
    const double q = integrate_sphere([N](const UnitVector& x) { return std::pow(1.0 - x.z() * x.z(), N); }, r);
    const double closed = std::exp(std::log(2.0 * kPi) + (2.0 * N + 1.0) * std::log(2.0) +
                                   2.0 * std::lgamma(N + 1.0) - std::lgamma(2.0 * N + 2.0));
    EXPECT_NEAR(q / closed, 1.0, 1e-12) << N;
    EXPECT_NEAR(wallis_sin_power(N) / closed, 1.0, 1e-12) << N;
  }
}

TEST(SphereRule, IntegratesHarmonicsToZero) {
  for (int d : {1, 5, 16, 31}) {
    const SphereRule rule(d);
    const RealHarmonics h(d);
    std::vector<std::vector<double>> cols(h.size(), std::vector<double>(rule.size()));
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const auto y = h.evaluate(rule.node(i));
      for (std::size_t a = 0; a < h.size(); ++a) cols[a][i] = y[a];
    }
    for (std::size_t a = 1; a < h.size(); ++a) EXPECT_LE(std::abs(integrate_tabulated(cols[a], rule)), 1e-12);
    double w = 0.0;
    for (double x : rule.weights()) w += x;
    EXPECT_NEAR(w, 4.0 * kPi, 1e-12);
  }
}

TEST(SphereRule, RequireDegree) {
  const SphereRule r(10);
  EXPECT_NO_THROW(require_degree(r, 10, "test"));
  EXPECT_THROW(require_degree(r, 11, "test"), RuleTooCoarse);
}

TEST(SphereRule, PredictedMemoryWithinTenPercent) {
  for (int d : {2, 50, 400, 2050}) {
    const SphereRule r(d);
    const double pred = double(SphereRule::predicted_bytes(d));
    const double got = double(r.allocated_bytes());
    EXPECT_LE(std::abs(pred - got), 0.1 * got) << d;
    EXPECT_GE(got, double(r.size() * 4 * sizeof(double)));
  }
}

TEST(Integrate, NonFiniteReportsTheNode) {
  const SphereRule r(4);
  try {
    integrate_sphere([](const UnitVector& x) { return x.z() > 0.5 ? NAN : 1.0; }, r);
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(Integrate, Linear) {
  const SphereRule r(12);
  const auto f = [](const UnitVector& x) { return x.x() * x.x() * x.y() + 0.3; };
  const auto g = [](const UnitVector& x) { return std::pow(x.z(), 6); };
  const double a = integrate_sphere(f, r), b = integrate_sphere(g, r);
  const double ab = integrate_sphere([&](const UnitVector& x) { return f(x) + g(x); }, r);
  EXPECT_NEAR(ab, a + b, 1e-13);
  EXPECT_NEAR(b, 4.0 * kPi / 7.0, 1e-13);
}

TEST(CircleRule, ExactForTrigPolynomials) {
  EXPECT_THROW(CircleRule(3), std::invalid_argument);
  const CircleRule c(16);
  for (int k = 1; k < 16; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) s += std::cos(k * c.node(i));
    EXPECT_NEAR(s / 16.0, 0.0, 1e-14) << k;
  }
}

TEST(CircleAverage, ClosedForms) {
  const auto one = bank_observable("one");
  const auto x3sq = bank_observable("x3sq");
  EXPECT_DOUBLE_EQ(circle_average(OrientedGreatCircle(UnitVector::e1()), one), 1.0);
  EXPECT_NEAR(circle_average(OrientedGreatCircle(UnitVector::e3()), x3sq), 0.0, 1e-30);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto p = beamqe::testing::random_unit(rng);
    const OrientedGreatCircle c(p);
    EXPECT_NEAR(circle_average(c, x3sq), (1.0 - p.z() * p.z()) / 2.0, 1e-14);
    EXPECT_NEAR(circle_average(c, x3sq, 1024), circle_average(c, x3sq, 4), 1e-14);
  }
  EXPECT_THROW(circle_average(OrientedGreatCircle(), one, 3), std::invalid_argument);
}

TEST(CircleAverage, SpectralConvergenceOnTheBank) {
  std::mt19937_64 rng(6);
  for (const auto& a : observable_bank()) {
    for (int i = 0; i < 20; ++i) {
      const OrientedGreatCircle c(beamqe::testing::random_unit(rng));
      EXPECT_LT(std::abs(circle_average(c, a, 64) - circle_average(c, a, 128)), 1e-10) << a.name();
    }
  }
}

TEST(CircleAverage, PhaseSpaceMatchesParameterizedIntegral) {
  // a = <xi, e3>^2 on G_p: xi(t) = -sin t u + cos t v, so the average is (u3^2 + v3^2)/2.
  const auto xi3sq = bank_observable("xi3sq");
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto p = beamqe::testing::random_unit(rng);
    const Frame f = frame_for_pole(p);
    EXPECT_NEAR(circle_average(OrientedGreatCircle(f), xi3sq), (f.u.z() * f.u.z() + f.v.z() * f.v.z()) / 2.0, 1e-14);
  }
}

TEST(Observable, PositionCallOnPhaseSpaceThrows) {
  const auto xi3sq = bank_observable("xi3sq");
  EXPECT_FALSE(xi3sq.is_position());
  EXPECT_THROW(xi3sq(UnitVector::e1()), std::logic_error);
  EXPECT_THROW(bank_observable("nope"), ConfigError);
  EXPECT_EQ(observable_bank().size(), 6u);
}

TEST(Liouville, Normalization) {
  EXPECT_NEAR(liouville_average(bank_observable("one")), 1.0, 1e-12);
  EXPECT_NEAR(liouville_average(bank_observable("x3sq")), 1.0 / 3.0, 1e-10);
}

TEST(Liouville, PositionObservablesPushForwardToSphereMean) {
  const SphereRule rule(40);
  for (const auto& a : observable_bank()) {
    if (!a.is_position()) continue;
    const double mean = integrate_sphere([&](const UnitVector& x) { return a(x); }, rule) / (4.0 * kPi);
    EXPECT_NEAR(liouville_average(a), mean, 1e-10) << a.name();
  }
}

TEST(Liouville, MonteCarloOracleForPhaseSpace) {
  // Uniform (p, t): p uniform on S^2, t uniform on [0, 2pi).
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> ut(0.0, 2.0 * kPi);
  for (const char* name : {"xi3sq", "x1sq_xi3sq"}) {
    const auto a = bank_observable(name);
    double s = 0.0, s2 = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
      const OrientedGreatCircle c(beamqe::testing::random_unit(rng));
      const double t = ut(rng);
      const double v = a(c.point(t), c.tangent(t));
      s += v;
      s2 += v * v;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_NEAR(liouville_average(a), mean, 5.0 * se) << name;
  }
  EXPECT_NEAR(liouville_average(bank_observable("xi3sq")), 1.0 / 3.0, 1e-10);
}

TEST(Liouville, RotationInvariant) {
  std::mt19937_64 rng(31);
  for (const auto& a : observable_bank()) {
    for (int i = 0; i < 3; ++i) {
      const auto r = beamqe::testing::random_rotation(rng);
      EXPECT_NEAR(liouville_average(a.rotated(r)), liouville_average(a), 1e-10) << a.name();
    }
  }
}
