#include "beamqe/beam.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace beamqe {

double log_norm_constant(int N) {
  if (N < 1) throw std::invalid_argument("log_norm_constant: N must be >= 1");
  const double n = double(N);
  return -0.5 * (std::log(2.0 * std::numbers::pi) + (2.0 * n + 1.0) * std::log(2.0) +
                 2.0 * std::lgamma(n + 1.0) - std::lgamma(2.0 * n + 2.0));
}

double normalization_constant(int N) {
  return std::exp(log_norm_constant(N) - 0.25 * std::log(double(N)));
}

GaussianBeam::GaussianBeam(int N, const UnitVector& pole) : GaussianBeam(N, frame_for_pole(pole)) {}

GaussianBeam::GaussianBeam(int N, const Frame& frame)
    : N_(N), frame_(frame), log_amp_(log_norm_constant(N)), amp_(std::exp(log_amp_)),
      min_r2_(std::exp(2.0 * kPruneLogRatio / double(N))) {}

std::complex<double> GaussianBeam::operator()(const UnitVector& x) const {
  const double a = dot(x, frame_.u);
  const double b = dot(x, frame_.v);
  const double r = std::hypot(a, b);
  if (r == 0.0) return {0.0, 0.0};
  const double log_mag = log_amp_ + double(N_) * std::log(r);
  if (log_mag < -745.0) return {0.0, 0.0};
  const double phase = double(N_) * std::atan2(b, a);
  return std::polar(std::exp(log_mag), phase);
}

double overlap_bound(int N, double beta) {
  const double c = std::cos(0.5 * beta);
  if (c <= 0.0) return 0.0;
  return std::exp(2.0 * double(N) * std::log(c));
}

double overlap_bound(const GaussianBeam& bj, const GaussianBeam& bk) {
  if (bj.degree() != bk.degree()) {
    throw std::invalid_argument("overlap_bound: beams have degrees " + std::to_string(bj.degree()) +
                                " and " + std::to_string(bk.degree()));
  }
  return overlap_bound(bj.degree(), geodesic_distance(bj.pole(), bk.pole()));
}

std::complex<double> overlap_numeric(const GaussianBeam& bj, const GaussianBeam& bk,
                                     const SphereRule& rule) {
  if (bj.degree() != bk.degree()) {
    throw std::invalid_argument("overlap_numeric: degree mismatch");
  }
  require_degree(rule, 2 * bj.degree(), "overlap_numeric");
  const auto xs = rule.xs(), ys = rule.ys(), zs = rule.zs(), ws = rule.weights();
  std::vector<std::complex<double>> terms(rule.size());
  parallel_for(rule.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double jr = 0, ji = 0, kr = 0, ki = 0;
      if (!bj.accumulate(xs[i], ys[i], zs[i], jr, ji) || !bk.accumulate(xs[i], ys[i], zs[i], kr, ki)) {
        terms[i] = {0.0, 0.0};
        continue;
      }
      // Q_j * conj(Q_k)
      terms[i] = {ws[i] * (jr * kr + ji * ki), ws[i] * (ji * kr - jr * ki)};
    }
  });
  return pairwise_sum(terms);
}

}  // namespace beamqe
