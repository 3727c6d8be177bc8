#pragma once

// Exact geometry on the unit sphere S^2: unit vectors, right-handed frames,
// oriented great circles and the rotations that carry e3 onto a pole.

#include <array>
#include <cmath>
#include <numbers>

namespace beamqe {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  friend constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Clamp to [-1, 1] before handing a cosine/sine to acos/asin.
constexpr double clamp_unit(double c) { return c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c); }

/// A point of S^2. Construction always normalizes, so |v| = 1 to rounding.
class UnitVector {
 public:
  /// Defaults to the north pole e3.
  constexpr UnitVector() = default;

  /// Normalizes v. Throws std::invalid_argument for zero or non-finite input.
  explicit UnitVector(const Vec3& v);
  UnitVector(double x, double y, double z) : UnitVector(Vec3{x, y, z}) {}

  /// Keeps v bit-for-bit; throws std::invalid_argument unless | |v| - 1 | <= 1e-12.
  static UnitVector from_normalized(const Vec3& v);

  /// (sin phi cos theta, sin phi sin theta, cos phi); phi is the colatitude.
  static UnitVector from_spherical(double phi, double theta);

  static constexpr UnitVector e1() { return UnitVector(Vec3{1, 0, 0}, Exact{}); }
  static constexpr UnitVector e2() { return UnitVector(Vec3{0, 1, 0}, Exact{}); }
  static constexpr UnitVector e3() { return UnitVector(Vec3{0, 0, 1}, Exact{}); }

  constexpr double x() const { return v_.x; }
  constexpr double y() const { return v_.y; }
  constexpr double z() const { return v_.z; }
  constexpr const Vec3& vec() const { return v_; }
  constexpr operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)

  constexpr UnitVector operator-() const { return UnitVector(-v_, Exact{}); }
  constexpr bool operator==(const UnitVector&) const = default;

  double colatitude() const { return std::acos(clamp_unit(v_.z)); }
  double longitude() const { return std::atan2(v_.y, v_.x); }

 private:
  struct Exact {};
  constexpr UnitVector(const Vec3& v, Exact) : v_(v) {}

  Vec3 v_{0, 0, 1};
};

/// Right-handed orthonormal triple (u, v, p); p is the pole of the circle span(u, v).
struct Frame {
  UnitVector u = UnitVector::e1();
  UnitVector v = UnitVector::e2();
  UnitVector p = UnitVector::e3();
};

/// Great circle t -> cos t u + sin t v, oriented counter-clockwise about its pole.
class OrientedGreatCircle {
 public:
  OrientedGreatCircle() = default;
  explicit OrientedGreatCircle(const Frame& frame) : frame_(frame) {}
  explicit OrientedGreatCircle(const UnitVector& pole);

  const Frame& frame() const { return frame_; }
  const UnitVector& pole() const { return frame_.p; }

  UnitVector point(double t) const;
  UnitVector tangent(double t) const;

 private:
  Frame frame_;
};

/// 3x3 rotation stored row-major.
struct Rotation {
  std::array<double, 9> a{1, 0, 0, 0, 1, 0, 0, 0, 1};

  Vec3 apply(const Vec3& v) const {
    return {a[0] * v.x + a[1] * v.y + a[2] * v.z, a[3] * v.x + a[4] * v.y + a[5] * v.z,
            a[6] * v.x + a[7] * v.y + a[8] * v.z};
  }
  UnitVector operator()(const UnitVector& v) const { return UnitVector(apply(v.vec())); }
  Rotation operator*(const Rotation& o) const;
  Rotation transpose() const;
  double determinant() const;

  /// Rodrigues rotation by `angle` about `axis`.
  static Rotation about_axis(const UnitVector& axis, double angle);
};

/// Geodesic distance in [0, pi]: acos of the clamped dot product.
double geodesic_distance(const UnitVector& p, const UnitVector& q);

/// Distance in [0, pi/2] from q to the great circle whose pole is `pole`.
double circle_point_distance(const UnitVector& pole, const UnitVector& q);

/// Deterministic right-handed frame with third axis p.
///
/// u = normalize(e3 x p) away from the poles. When |<p, e3>| > 1 - 1e-9 the
/// tie-break is u = e1 (projected onto the tangent plane), which gives
/// (e1, e2, e3) at the north pole and (e1, -e2, -e3) at the south pole.
Frame frame_for_pole(const UnitVector& p);

/// Rotation with columns (u, v, p) of frame_for_pole(p): maps e1, e2, e3 to u, v, p.
Rotation rotation_to_pole(const UnitVector& p);

/// Applies R to every member of a frame.
Frame rotate(const Rotation& r, const Frame& f);

}  // namespace beamqe
