#include "beamqe/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beamqe {

RealHarmonics::RealHarmonics(int lmax) : lmax_(lmax) {
  if (lmax < 0) throw std::invalid_argument("RealHarmonics: lmax must be >= 0");
  a_.assign(size(), 0.0);
  b_.assign(size(), 0.0);
  for (int k = 0; k <= lmax; ++k) {
    for (int l = k + 2; l <= lmax; ++l) {
      const double l2 = double(l) * l, k2 = double(k) * k, lm1 = double(l - 1);
      a_[index(l, k)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - k2));
      b_[index(l, k)] = std::sqrt((lm1 * lm1 - k2) / (4.0 * lm1 * lm1 - 1.0));
    }
  }
}

void RealHarmonics::evaluate(const UnitVector& x, std::span<double> out) const {
  if (out.size() < size()) throw std::invalid_argument("RealHarmonics: output span too small");
  const double ct = clamp_unit(x.z());
  const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  const double phi = std::atan2(x.y(), x.x());

  // Fully normalized P_l^k(cos theta) stored temporarily in the k >= 0 slots.
  double pkk = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int k = 0; k <= lmax_; ++k) {
    if (k > 0) pkk *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * st;
    out[index(k, k)] = pkk;
    if (k + 1 <= lmax_) out[index(k + 1, k)] = std::sqrt(2.0 * k + 3.0) * ct * pkk;
    for (int l = k + 2; l <= lmax_; ++l) {
      const std::size_t i = index(l, k);
      out[i] = a_[i] * (ct * out[index(l - 1, k)] - b_[i] * out[index(l - 2, k)]);
    }
  }
  for (int k = 1; k <= lmax_; ++k) {
    const double c = std::sqrt(2.0) * std::cos(k * phi);
    const double s = std::sqrt(2.0) * std::sin(k * phi);
    for (int l = k; l <= lmax_; ++l) {
      const double p = out[index(l, k)];
      out[index(l, k)] = p * c;
      out[index(l, -k)] = p * s;
    }
  }
}

std::vector<double> RealHarmonics::evaluate(const UnitVector& x) const {
  std::vector<double> v(size());
  evaluate(x, v);
  return v;
}

}  // namespace beamqe
