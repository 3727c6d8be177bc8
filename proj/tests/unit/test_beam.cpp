#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "beamqe/beam.hpp"
#include "beamqe/errors.hpp"
#include "beamqe/quadrature.hpp"
#include "random_rotation.hpp"

using namespace beamqe;

namespace {

constexpr double kPi = std::numbers::pi;

// A_N^2 * 2 pi * Wallis(N) = 1.
double wallis_log_norm(int N) {
  double I = 2.0;
  for (int k = 1; k <= N; ++k) I *= 2.0 * k / (2.0 * k + 1.0);
  return -0.5 * std::log(2.0 * kPi * I);
}

std::complex<double> direct_power(const GaussianBeam& b, const UnitVector& x) {
  const std::complex<double> z(dot(x, b.frame().u), dot(x, b.frame().v));
  std::complex<double> p = 1.0;
  for (int k = 0; k < b.degree(); ++k) p *= z;
  return b.amplitude() * p;
}

}  // namespace

TEST(NormConstant, SmallDegreeClosedForms) {
  EXPECT_NEAR(log_norm_constant(1), std::log(std::sqrt(3.0 / (8.0 * kPi))), 1e-15);
  EXPECT_NEAR(log_norm_constant(2), std::log(std::sqrt(15.0 / (32.0 * kPi))), 1e-15);
  EXPECT_NEAR(normalization_constant(1), 0.345494, 1e-6);
  EXPECT_THROW(log_norm_constant(0), std::invalid_argument);
}

TEST(NormConstant, MatchesWallisRecursion) {
  for (int N : {1, 3, 10, 100, 1000, 100000}) EXPECT_NEAR(log_norm_constant(N), wallis_log_norm(N), 1e-12 + 1e-14 * N) << N;
  EXPECT_TRUE(std::isfinite(log_norm_constant(1000000)));
}

TEST(NormConstant, QuadratureConsistency) {
  for (int N : {1, 10, 100, 1000}) {
    const SphereRule r(2 * N);
    std::vector<double> f(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double z = r.zs()[i];
      f[i] = std::pow(1.0 - z * z, N);
    }
    EXPECT_NEAR(std::exp(2.0 * log_norm_constant(N)) * integrate_tabulated(f, r), 1.0, 1e-12) << N;
  }
}

TEST(NormConstant, CNBoundedAndConverging) {
  // I_N ~ sqrt(pi / N) gives C_N -> (4 pi^3)^{-1/4}.
  const double limit = std::pow(4.0 * kPi * kPi * kPi, -0.25);
  double prev = normalization_constant(1);
  for (int N = 2; N <= 1 << 16; N *= 2) {
    const double c = normalization_constant(N);
    EXPECT_LT(c, prev);
    EXPECT_GT(c, limit);
    prev = c;
  }
  EXPECT_NEAR(normalization_constant(1 << 20), limit, 1e-6);
  EXPECT_EQ(harmonic_space_dimension(10), 21);
}

TEST(Beam, NorthPoleReproducesTheHighestWeightHarmonic) {
  const int N = 37;
  const GaussianBeam b(N, UnitVector::e3());
  for (double phi : {0.3, 1.0, kPi / 2.0, 2.5}) {
    for (double theta : {0.0, 0.7, 3.0, -2.0}) {
      const auto x = UnitVector::from_spherical(phi, theta);
      const auto ref = std::polar(b.amplitude() * std::pow(std::sin(phi), N), N * theta);
      const auto got = b(x);
      EXPECT_NEAR(got.real(), ref.real(), 1e-12 * b.amplitude());
      EXPECT_NEAR(got.imag(), ref.imag(), 1e-12 * b.amplitude());
    }
  }
  EXPECT_NEAR(b.amplitude(), normalization_constant(N) * std::pow(double(N), 0.25), 1e-15);
}

TEST(Beam, SouthPoleMagnitude) {
  const int N = 20;
  const GaussianBeam b(N, -UnitVector::e3());
  for (double phi : {0.4, 1.2, 2.9}) {
    const auto x = UnitVector::from_spherical(phi, 1.1);
    EXPECT_NEAR(std::abs(b(x)), b.amplitude() * std::pow(std::sin(phi), N), 1e-13);
    // conj phase: (x1 - i x2)^N
    const auto ref = std::polar(b.amplitude() * std::pow(std::sin(phi), N), -N * 1.1);
    EXPECT_NEAR(std::abs(b(x) - ref), 0.0, 1e-12);
  }
}

TEST(Beam, CircleMaxPoleZeroAndDistanceProfile) {
  const int N = 100;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto p = beamqe::testing::random_unit(rng);
    const GaussianBeam b(N, p);
    const OrientedGreatCircle c(p);
    EXPECT_NEAR(std::abs(b(c.point(0.37 * i))), b.amplitude(), 1e-13);
    EXPECT_EQ(b(p), std::complex<double>(0.0, 0.0));
    // x at distance 0.3 from the circle: rotate a circle point toward the pole.
    const Vec3 x = std::cos(0.3) * c.point(1.0).vec() + std::sin(0.3) * p.vec();
    const UnitVector xv(x);
    const double ref = b.amplitude() * std::pow(std::cos(0.3), N);
    EXPECT_NEAR(std::abs(b(xv)) / ref, 1.0, 1e-12);
    EXPECT_NEAR(std::abs(direct_power(b, xv)) / ref, 1.0, 1e-12);
  }
}

TEST(Beam, LogDomainAgreesWithGridKernelAndDirectPower) {
  std::mt19937_64 rng(2);
  for (int N : {1, 2, 7, 64, 333}) {
    const GaussianBeam b(N, beamqe::testing::random_unit(rng));
    for (int i = 0; i < 200; ++i) {
      const auto x = beamqe::testing::random_unit(rng);
      const auto v = b(x);
      const auto d = direct_power(b, x);
      double re = 0.0, im = 0.0;
      const bool kept = b.accumulate(x.x(), x.y(), x.z(), re, im);
      EXPECT_LE(std::abs(v - d), 1e-12 * b.amplitude()) << N;
      if (kept) EXPECT_LE(std::abs(v - std::complex<double>(re, im)), 1e-12 * b.amplitude()) << N;
      else EXPECT_LE(std::abs(v), b.amplitude() * std::exp(kPruneLogRatio) * 1.0000001);
    }
  }
}

TEST(Beam, UnderflowClampsToZero) {
  const GaussianBeam b(100000, UnitVector::e3());
  EXPECT_EQ(b(UnitVector::from_spherical(0.5, 0.0)), std::complex<double>(0.0, 0.0));
  EXPECT_TRUE(std::isfinite(std::abs(b(UnitVector::e1()))));
}

TEST(Beam, UnitNormUnderQuadrature) {
  std::mt19937_64 rng(3);
  for (int N : {1, 5, 32, 200, 1024}) {
    const GaussianBeam b(N, beamqe::testing::random_unit(rng));
    const SphereRule r(2 * N);
    EXPECT_NEAR(std::abs(overlap_numeric(b, b, r)), 1.0, 1e-10) << N;
  }
}

TEST(Beam, RotationEquivariantMagnitude) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 40; ++i) {
    const auto R = beamqe::testing::random_rotation(rng);
    const auto p = beamqe::testing::random_unit(rng);
    const GaussianBeam b(50, p), rb(50, R(p));
    for (int k = 0; k < 20; ++k) {
      const auto x = beamqe::testing::random_unit(rng);
      EXPECT_NEAR(std::abs(rb(R(x))), std::abs(b(x)), 1e-12);
    }
  }
}

TEST(Beam, FramePhaseOnlyChangesGlobalPhase) {
  std::mt19937_64 rng(5);
  const auto p = beamqe::testing::random_unit(rng);
  const Frame f = frame_for_pole(p);
  const double a = 0.9;
  const Frame g{UnitVector(std::cos(a) * f.u.vec() + std::sin(a) * f.v.vec()),
                UnitVector(-std::sin(a) * f.u.vec() + std::cos(a) * f.v.vec()), p};
  const int N = 30;
  const GaussianBeam b(N, f), c(N, g);
  const SphereRule r(2 * N);
  const GaussianBeam other(N, beamqe::testing::random_unit(rng));
  EXPECT_NEAR(std::abs(overlap_numeric(b, other, r)), std::abs(overlap_numeric(c, other, r)), 1e-12);
  for (int k = 0; k < 20; ++k) {
    const auto x = beamqe::testing::random_unit(rng);
    EXPECT_NEAR(std::abs(b(x)), std::abs(c(x)), 1e-12);
    // (u' + i v') = e^{-i a}(u + i v), so Q' = e^{-i N a} Q.
    EXPECT_LE(std::abs(c(x) - std::polar(1.0, -N * a) * b(x)), 1e-12);
  }
}

TEST(OverlapBound, Anchors) {
  EXPECT_EQ(overlap_bound(10, kPi), 0.0);
  EXPECT_EQ(overlap_bound(10, 0.0), 1.0);
  EXPECT_NEAR(overlap_bound(10, kPi / 2.0), 9.765625e-4, 1e-18);
  EXPECT_THROW(overlap_bound(GaussianBeam(3, UnitVector::e1()), GaussianBeam(4, UnitVector::e2())),
               std::invalid_argument);
}

TEST(OverlapNumeric, AntipodalAndBound) {
  for (int N : {1, 8, 20, 128}) {
    const SphereRule r(2 * N);
    const auto p = UnitVector(0.3, -0.2, 0.9);
    EXPECT_LE(std::abs(overlap_numeric(GaussianBeam(N, p), GaussianBeam(N, -p), r)), 1e-12) << N;
  }
  const int N = 20;
  const SphereRule r(2 * N);
  const GaussianBeam a(N, UnitVector::e3());
  const GaussianBeam b(N, UnitVector::from_spherical(kPi / 3.0, 0.4));
  const double mag = std::abs(overlap_numeric(a, b, r));
  EXPECT_LE(mag, overlap_bound(a, b) + 1e-10);
  EXPECT_GT(mag / overlap_bound(a, b), 0.99);
}

TEST(OverlapNumeric, RejectsCoarseRuleAndMismatch) {
  const GaussianBeam a(10, UnitVector::e3()), b(10, UnitVector::e1()), c(11, UnitVector::e1());
  EXPECT_THROW(overlap_numeric(a, b, SphereRule(19)), RuleTooCoarse);
  EXPECT_THROW(overlap_numeric(a, c, SphereRule(30)), std::invalid_argument);
}

TEST(Beam, ConcentrationMoment) {
  std::mt19937_64 rng(6);
  for (int N : {4, 64, 512}) {
    const auto p = beamqe::testing::random_unit(rng);
    const GaussianBeam b(N, p);
    const SphereRule r(2 * N + 2);
    const double m2 =
        integrate_sphere([&](const UnitVector& x) { return dot(x, p) * dot(x, p) * std::norm(b(x)); }, r);
    EXPECT_NEAR(m2, 1.0 / (2.0 * N + 3.0), 1e-10) << N;
  }
}
