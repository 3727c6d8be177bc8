#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beamqe/errors.hpp"
#include "beamqe/superposition.hpp"
#include "random_rotation.hpp"

using namespace beamqe;

namespace {

constexpr double kPi = std::numbers::pi;

BeamSuperposition certified_build(int N, double D, const PointSet& ps) {
  static std::vector<std::unique_ptr<Certificate>> keep;
  keep.push_back(std::make_unique<Certificate>(verify(ps)));
  BuildOptions o;
  o.certificate = keep.back().get();
  return BeamSuperposition::build(N, D, ps, o);
}

BeamSuperposition forced(int N, const PointSet& ps) {
  BuildOptions o;
  o.override_checks = true;
  return BeamSuperposition::build(N, 1.0, ps, o);
}

PointSet antipodal(const UnitVector& p) { return PointSet({p, -p}, PointKind::file, 0); }

}  // namespace

TEST(ChooseM, Examples) {
  EXPECT_EQ(choose_m(1024, 2.0), 8u);
  EXPECT_EQ(choose_m(100, 1.0), 10u);
  EXPECT_EQ(choose_m(145, 1.0), 12u);
  // Odd integer targets are ties and round down.
  EXPECT_EQ(choose_m(25, 1.0), 4u);
  EXPECT_EQ(choose_m(49, 1.0), 6u);
  EXPECT_EQ(choose_m(1, 1.0), 2u);
  EXPECT_EQ(choose_m(50, 1.0), 8u);
  EXPECT_THROW(choose_m(15, 2.0), std::invalid_argument);
  EXPECT_THROW(choose_m(0, 1.0), std::invalid_argument);
  EXPECT_THROW(choose_m(10, 0.0), std::invalid_argument);
}

TEST(Build, ChecksMAndCertificate) {
  const auto ps = generate(PointKind::fibonacci, 4);
  EXPECT_THROW(BeamSuperposition::build(256, 1.0, ps), std::invalid_argument);
  EXPECT_THROW(BeamSuperposition::build(256, 2.0, ps), CertificateError);
  Certificate bad = verify(ps);
  bad.separation_ok = false;
  BuildOptions o;
  o.certificate = &bad;
  EXPECT_THROW(BeamSuperposition::build(256, 2.0, ps, o), CertificateError);
  o.override_checks = true;
  const auto F = BeamSuperposition::build(256, 2.0, ps, o);
  EXPECT_TRUE(F.overridden());
  EXPECT_FALSE(F.certified());
  const auto G = certified_build(256, 2.0, ps);
  EXPECT_TRUE(G.certified());
  EXPECT_FALSE(G.overridden());
  EXPECT_EQ(G.m(), 4u);
  EXPECT_NEAR(G.c0D_proxy(), G.min_separation() * 4.0, 1e-15);
}

TEST(Build, BeamsFollowThePointOrder) {
  const auto ps = generate(PointKind::spiral, 8);
  const auto F = certified_build(1024, 2.0, ps);
  for (std::size_t j = 0; j < F.m(); ++j) {
    EXPECT_EQ(F.beams()[j].pole(), ps[j]);
    EXPECT_EQ(F.beams()[j].degree(), 1024);
  }
}

TEST(L2, AntipodalPairIsExactlyTwo) {
  const auto F = certified_build(64, 2.0, antipodal(UnitVector(0.1, 0.7, -0.3)));
  const auto l2 = l2_norm_analytic(F);
  EXPECT_NEAR(l2.norm_squared, 2.0, 1e-12);
  EXPECT_NEAR(l2.offdiagonal_total, 0.0, 1e-12);
  EXPECT_NEAR(l2_norm_quadrature(F, SphereRule(128)), 2.0, 1e-12);
}

TEST(L2, SingleBeam) {
  const auto F = forced(40, generate(PointKind::fibonacci, 1));
  EXPECT_NEAR(l2_norm_analytic(F).norm_squared, 1.0, 1e-12);
  EXPECT_NEAR(l2_norm_quadrature(F, SphereRule(80)), 1.0, 1e-12);
  const auto u = normalized(F);
  const UnitVector x(0.3, 0.4, 0.5);
  EXPECT_NEAR(std::abs(u(x) - F.beams()[0](x)), 0.0, 1e-12);
}

TEST(L2, FibonacciNearM) {
  const auto F = certified_build(256, 2.0, generate(PointKind::fibonacci, 4));
  const auto l2 = l2_norm_analytic(F);
  const double bound = 16.0 * overlap_bound(256, l2.min_beta);
  EXPECT_LE(std::abs(l2.norm_squared - 4.0), std::max(1e-6, bound));
  EXPECT_LE(std::abs(l2.offdiagonal_total), bound + 1e-15);
  EXPECT_NEAR(l2.min_beta, F.min_separation(), 1e-15);
}

TEST(L2, QuadratureMatchesAnalyticWithRealOverlaps) {
  // Override to a crowded set so many pairs overlap measurably.
  const auto F = forced(60, generate(PointKind::fibonacci, 30));
  const auto l2 = l2_norm_analytic(F);
  EXPECT_GT(l2.pairs_computed, 0u);
  EXPECT_GT(std::abs(l2.offdiagonal_total), 1e-6);
  const double q = l2_norm_quadrature(F, SphereRule(120));
  EXPECT_NEAR(q / l2.norm_squared, 1.0, 1e-8);
  EXPECT_THROW(l2_norm_quadrature(F, SphereRule(119)), RuleTooCoarse);
}

TEST(L2, MutualOracleForTwoBeams) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const int N = 30;
    const PointSet ps({beamqe::testing::random_unit(rng), beamqe::testing::random_unit(rng)}, PointKind::file, 0);
    const auto F = forced(N, ps);
    const SphereRule r(2 * N);
    const auto ov = overlap_numeric(F.beams()[0], F.beams()[1], r);
    const double direct = integrate_sphere([&](const UnitVector& x) { return std::norm(F(x)); }, r);
    EXPECT_NEAR(direct, 2.0 + 2.0 * ov.real(), 1e-12);
    EXPECT_NEAR(l2_norm_analytic(F).norm_squared, direct, 1e-12);
  }
}

TEST(Eval, GridMatchesPointwiseAndIsLinear) {
  const auto F = forced(300, generate(PointKind::fibonacci, 12));
  std::mt19937_64 rng(5);
  std::vector<UnitVector> pts;
  for (int i = 0; i < 2000; ++i) pts.push_back(beamqe::testing::random_unit(rng));
  // Points on circles, where values are large.
  for (const auto& b : F.beams()) pts.push_back(OrientedGreatCircle(b.frame()).point(1.3));
  const auto grid = F.eval_grid(pts);
  const double scale = F.beams()[0].amplitude();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto v = F(pts[i]);
    EXPECT_LE(std::abs(grid[i] - v), 1e-12 * scale);
    std::complex<double> s = 0.0;
    for (const auto& b : F.beams()) s += b(pts[i]);
    EXPECT_EQ(v, s);
  }
}

TEST(SupNorm, SingleBeamPeakIsTheAmplitude) {
  const int N = 128;
  const auto F = forced(N, PointSet({UnitVector(0.2, -0.4, 0.8)}, PointKind::file, 0));
  const auto rec = sup_norm(F);
  const double A = F.beams()[0].amplitude();
  EXPECT_NEAR(rec.value, A, 1e-12 * A);
  EXPECT_NEAR(circle_point_distance(F.beams()[0].pole(), rec.argmax), 0.0, 1e-6);
  EXPECT_NEAR(rec.value, std::abs(F(rec.argmax)), 1e-12 * A);
  EXPECT_GE(rec.value, rec.grid_max);
  EXPECT_LT(rec.certified_gap, 0.2 * rec.value);
  EXPECT_LT(sup_norm(F, {.oversample = 16}).certified_gap, 0.01 * rec.value);
  EXPECT_THROW(sup_norm(F, {.oversample = 1}), std::invalid_argument);
}

TEST(SupNorm, AntipodalPairAgainstDirectGrid) {
  const int N = 64;
  const auto F = certified_build(N, 2.0, antipodal(UnitVector(0.3, 0.1, 0.9)));
  const auto rec = sup_norm(F);
  const double A = F.beams()[0].amplitude();
  EXPECT_LE(rec.value, 2.0 * A + 1e-12);
  // Direct fine equiangular grid oracle.
  double best = 0.0;
  const int n = 1200;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j < 2 * n; ++j) {
      best = std::max(best, std::abs(F(UnitVector::from_spherical(kPi * i / n, kPi * j / n))));
    }
  }
  EXPECT_GE(rec.value, best - 1e-12);
  EXPECT_LE(rec.value - best, 1e-3 * best);
}

TEST(SupNorm, NondecreasingInOversample) {
  const auto F = forced(200, generate(PointKind::fibonacci, 10));
  double prev = 0.0;
  for (int f : {2, 4, 8}) {
    SupNormOptions o;
    o.oversample = f;
    const auto rec = sup_norm(F, o);
    EXPECT_GE(rec.value, prev - 1e-12 * rec.value) << f;
    EXPECT_GE(rec.value, rec.grid_max);
    prev = rec.value;
  }
}

TEST(PoleSums, AllPolesOnTheEquatorOfX) {
  std::vector<UnitVector> pts;
  for (int k = 0; k < 6; ++k) pts.push_back(UnitVector::from_spherical(kPi / 2.0, k * kPi / 6.0));
  const auto F = forced(100, PointSet(pts, PointKind::file, 0));
  const auto s = pole_sum_decomposition(F, UnitVector::e3());
  EXPECT_NEAR(s.total, 6.0, 1e-12);
  EXPECT_EQ(s.count_I, 6u);
}

TEST(PoleSums, GroupThreeTail) {
  std::vector<UnitVector> pts;
  for (int k = 0; k < 8; ++k) pts.push_back(UnitVector::from_spherical(0.2 + 0.02 * k, k * 0.7));
  const int N = 400;
  const auto F = forced(N, PointSet(pts, PointKind::file, 0));
  const auto s = pole_sum_decomposition(F, UnitVector::e3());
  EXPECT_EQ(s.count_III, 8u);
  EXPECT_LE(s.sum_III, 8.0 * std::pow(std::cos(1.0 / 3.0), N));
}

TEST(PoleSums, BoundTheSuperpositionPointwise) {
  std::mt19937_64 rng(8);
  const auto F = forced(256, generate(PointKind::fibonacci, 16));
  const double A = F.beams()[0].amplitude();
  for (int i = 0; i < 2000; ++i) {
    const auto x = beamqe::testing::random_unit(rng);
    EXPECT_LE(std::abs(F(x)), A * pole_sum_decomposition(F, x).total * (1.0 + 1e-12) + 1e-300);
  }
}

TEST(Superposition, RotationInvariance) {
  std::mt19937_64 rng(10);
  const auto ps = generate(PointKind::fibonacci, 8);
  const auto R = beamqe::testing::random_rotation(rng);
  const auto F = forced(150, ps);
  const auto G = forced(150, ps.rotated(R));
  EXPECT_NEAR(l2_norm_analytic(F).norm_squared, l2_norm_analytic(G).norm_squared, 1e-10);
  for (int i = 0; i < 50; ++i) {
    const auto x = beamqe::testing::random_unit(rng);
    EXPECT_NEAR(pole_sum_decomposition(F, x).total, pole_sum_decomposition(G, R(x)).total, 1e-10);
    // Rotating the frames along with the poles rotates F exactly.
    std::complex<double> rotated = 0.0;
    for (const auto& b : F.beams()) rotated += GaussianBeam(150, rotate(R, b.frame()))(R(x));
    EXPECT_NEAR(std::abs(rotated - F(x)), 0.0, 1e-12 * F.beams()[0].amplitude());
  }
}
