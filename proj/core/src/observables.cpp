#include <stdexcept>

#include "beamqe/errors.hpp"
#include "beamqe/quadrature.hpp"

namespace beamqe {

Observable Observable::position(std::string name, PositionFn f, int degree) {
  return Observable(
      std::move(name), Kind::position,
      [g = std::move(f)](const UnitVector& x, const UnitVector&) { return g(x); }, degree);
}

Observable Observable::phase_space(std::string name, PhaseFn f, int degree) {
  return Observable(std::move(name), Kind::phase_space, std::move(f), degree);
}

double Observable::operator()(const UnitVector& x) const {
  if (kind_ != Kind::position) {
    throw std::logic_error("observable '" + name_ + "' needs a covector argument");
  }
  return f_(x, x);
}

Observable Observable::rotated(const Rotation& r) const {
  const Rotation rt = r.transpose();
  return Observable(name_ + "_rotated", kind_,
                    [f = f_, rt](const UnitVector& x, const UnitVector& xi) { return f(rt(x), rt(xi)); },
                    degree_);
}

std::vector<Observable> observable_bank() {
  std::vector<Observable> bank;
  bank.push_back(Observable::position("one", [](const UnitVector&) { return 1.0; }, 0));
  bank.push_back(Observable::position("x3sq", [](const UnitVector& x) { return x.z() * x.z(); }, 2));
  bank.push_back(Observable::position("x1x2", [](const UnitVector& x) { return x.x() * x.y(); }, 2));
  // Legendre P_4 in x3, a zonal degree-4 harmonic up to normalization.
  bank.push_back(Observable::position(
      "zonal4",
      [](const UnitVector& x) {
        const double t2 = x.z() * x.z();
        return (35.0 * t2 * t2 - 30.0 * t2 + 3.0) / 8.0;
      },
      4));
  bank.push_back(Observable::phase_space(
      "xi3sq", [](const UnitVector&, const UnitVector& xi) { return xi.z() * xi.z(); }, 2));
  bank.push_back(Observable::phase_space(
      "x1sq_xi3sq",
      [](const UnitVector& x, const UnitVector& xi) { return x.x() * x.x() * xi.z() * xi.z(); }, 4));
  return bank;
}

Observable bank_observable(const std::string& name) {
  for (auto& a : observable_bank()) {
    if (a.name() == name) return a;
  }
  throw ConfigError("unknown observable '" + name + "'");
}

}  // namespace beamqe
