#include "beamqe/sphere.hpp"

#include <stdexcept>

namespace beamqe {

UnitVector::UnitVector(const Vec3& v) {
  const double n = norm(v);
  if (!std::isfinite(n) || n == 0.0) {
    throw std::invalid_argument("UnitVector: cannot normalize a zero or non-finite vector");
  }
  v_ = v * (1.0 / n);
}

UnitVector UnitVector::from_normalized(const Vec3& v) {
  if (!(std::abs(norm(v) - 1.0) <= 1e-12)) {
    throw std::invalid_argument("UnitVector: input is not normalized");
  }
  return UnitVector(v, Exact{});
}

UnitVector UnitVector::from_spherical(double phi, double theta) {
  const double s = std::sin(phi);
  return UnitVector(Vec3{s * std::cos(theta), s * std::sin(theta), std::cos(phi)});
}

OrientedGreatCircle::OrientedGreatCircle(const UnitVector& pole) : frame_(frame_for_pole(pole)) {}

UnitVector OrientedGreatCircle::point(double t) const {
  return UnitVector(std::cos(t) * frame_.u.vec() + std::sin(t) * frame_.v.vec());
}

UnitVector OrientedGreatCircle::tangent(double t) const {
  return UnitVector(-std::sin(t) * frame_.u.vec() + std::cos(t) * frame_.v.vec());
}

Rotation Rotation::operator*(const Rotation& o) const {
  Rotation r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[3 * i + k] * o.a[3 * k + j];
      r.a[3 * i + j] = s;
    }
  }
  return r;
}

Rotation Rotation::transpose() const {
  Rotation r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.a[3 * i + j] = a[3 * j + i];
  return r;
}

double Rotation::determinant() const {
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Rotation Rotation::about_axis(const UnitVector& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  const double x = axis.x(), y = axis.y(), z = axis.z();
  return Rotation{{t * x * x + c, t * x * y - s * z, t * x * z + s * y,  //
                   t * x * y + s * z, t * y * y + c, t * y * z - s * x,  //
                   t * x * z - s * y, t * y * z + s * x, t * z * z + c}};
}

double geodesic_distance(const UnitVector& p, const UnitVector& q) {
  return std::acos(clamp_unit(dot(p, q)));
}

double circle_point_distance(const UnitVector& pole, const UnitVector& q) {
  return std::abs(std::asin(clamp_unit(dot(pole, q))));
}

Frame frame_for_pole(const UnitVector& p) {
  constexpr double kPolarBand = 1.0 - 1e-9;
  Vec3 u;
  if (std::abs(p.z()) > kPolarBand) {
    const Vec3 e1{1, 0, 0};
    u = e1 - dot(e1, p) * p.vec();
  } else {
    u = cross(Vec3{0, 0, 1}, p);
  }
  const UnitVector uu(u);
  const UnitVector vv(cross(p, uu));
  return Frame{uu, vv, p};
}

Rotation rotation_to_pole(const UnitVector& p) {
  const Frame f = frame_for_pole(p);
  return Rotation{{f.u.x(), f.v.x(), f.p.x(),  //
                   f.u.y(), f.v.y(), f.p.y(),  //
                   f.u.z(), f.v.z(), f.p.z()}};
}

Frame rotate(const Rotation& r, const Frame& f) { return Frame{r(f.u), r(f.v), r(f.p)}; }

}  // namespace beamqe
