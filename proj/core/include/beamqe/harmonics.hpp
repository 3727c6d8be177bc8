#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "beamqe/sphere.hpp"

namespace beamqe {

/// Real orthonormal spherical harmonics Y_l^k, 0 <= l <= lmax, -l <= k <= l.
///
/// k > 0 uses sqrt(2) cos(k theta), k < 0 uses sqrt(2) sin(|k| theta); the
/// associated Legendre part comes from the standard fully normalized three-term
/// recurrence, which is stable well past l = 1000.
class RealHarmonics {
 public:
  explicit RealHarmonics(int lmax);

  int lmax() const { return lmax_; }
  std::size_t size() const { return static_cast<std::size_t>((lmax_ + 1) * (lmax_ + 1)); }
  static constexpr std::size_t index(int l, int k) {
    return static_cast<std::size_t>(l * l + l + k);
  }

  /// Writes all size() values at x into out.
  void evaluate(const UnitVector& x, std::span<double> out) const;
  std::vector<double> evaluate(const UnitVector& x) const;

 private:
  int lmax_;
  std::vector<double> a_, b_;  // recurrence coefficients indexed like index(l, k)
};

}  // namespace beamqe
