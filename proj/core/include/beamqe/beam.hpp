#pragma once

// Degree-N Gaussian beams: the highest-weight harmonic A_N (x1 + i x2)^N,
// A_N = C_N N^{1/4}, carried to an arbitrary pole by frame_for_pole.

#include <cmath>
#include <complex>

#include "beamqe/quadrature.hpp"
#include "beamqe/sphere.hpp"

namespace beamqe {

/// log(C_N N^{1/4}), the L^2 normalization of (x1 + i x2)^N on S^2:
/// -1/2 [log 2pi + (2N+1) log 2 + 2 lgamma(N+1) - lgamma(2N+2)].
/// Throws std::invalid_argument for N < 1.
double log_norm_constant(int N);

/// C_N = exp(log_norm_constant(N)) N^{-1/4}; bounded uniformly in N.
double normalization_constant(int N);

/// dim of degree-N spherical harmonics on S^2.
constexpr long harmonic_space_dimension(long N) { return 2 * N + 1; }

/// Below this log-ratio to the peak a beam term is dropped in grid kernels.
inline constexpr double kPruneLogRatio = -50.0;

class GaussianBeam {
 public:
  /// Beam with pole p and the frame convention of frame_for_pole.
  GaussianBeam(int N, const UnitVector& pole);
  /// Beam on an explicit right-handed frame; a rotation of (u, v) within the
  /// circle plane changes only the global phase.
  GaussianBeam(int N, const Frame& frame);

  int degree() const { return N_; }
  const Frame& frame() const { return frame_; }
  const UnitVector& pole() const { return frame_.p; }
  double log_amplitude() const { return log_amp_; }
  double amplitude() const { return amp_; }

  /// Log-domain evaluation; exactly 0 at the pole and wherever the log
  /// magnitude falls below -745.
  std::complex<double> operator()(const UnitVector& x) const;

  /// Grid kernel: amplitude * (a + i b)^N by binary powering, skipped (returns
  /// false) when |value| < amplitude * exp(kPruneLogRatio).
  bool accumulate(double x, double y, double z, double& re, double& im) const {
    const Vec3& u = frame_.u.vec();
    const Vec3& v = frame_.v.vec();
    const double a = u.x * x + u.y * y + u.z * z;
    const double b = v.x * x + v.y * y + v.z * z;
    if (a * a + b * b < min_r2_) return false;
    double pr = 1.0, pi = 0.0, br = a, bi = b;
    for (unsigned n = static_cast<unsigned>(N_);;) {
      if (n & 1u) {
        const double t = pr * br - pi * bi;
        pi = pr * bi + pi * br;
        pr = t;
      }
      n >>= 1u;
      if (n == 0) break;
      const double t = br * br - bi * bi;
      bi = 2.0 * br * bi;
      br = t;
    }
    re += amp_ * pr;
    im += amp_ * pi;
    return true;
  }

 private:
  int N_;
  Frame frame_;
  double log_amp_;
  double amp_;
  double min_r2_;
};

/// (cos(beta/2))^{2N} with beta the pole distance, in the log domain; 0 at beta = pi.
double overlap_bound(int N, double beta);
/// Throws std::invalid_argument on a degree mismatch.
double overlap_bound(const GaussianBeam& bj, const GaussianBeam& bk);

/// <Q_j, Q_k> = integral of Q_j conj(Q_k) by quadrature. Requires equal
/// degrees and rule.degree() >= 2N (RuleTooCoarse otherwise).
std::complex<double> overlap_numeric(const GaussianBeam& bj, const GaussianBeam& bk,
                                     const SphereRule& rule);

}  // namespace beamqe
