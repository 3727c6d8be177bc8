#pragma once

// Integration on S^2 (product Gauss-Legendre x trapezoid), on great circles
// (uniform trapezoid), and over the space of oriented great circles indexed
// by their poles (Liouville averages on the unit cosphere bundle).

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "beamqe/parallel.hpp"
#include "beamqe/sphere.hpp"

namespace beamqe {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
struct GaussLegendre {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // sum to 2
};
GaussLegendre gauss_legendre(std::size_t n);

/// Exact for every polynomial of total degree <= degree restricted to S^2.
class SphereRule {
 public:
  explicit SphereRule(int degree);

  int degree() const { return degree_; }
  std::size_t n_phi() const { return cos_phi_.size(); }
  std::size_t n_theta() const { return n_theta_; }
  std::size_t size() const { return x_.size(); }

  UnitVector node(std::size_t i) const { return UnitVector::from_normalized({x_[i], y_[i], z_[i]}); }
  double weight(std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const { return w_; }
  std::span<const double> xs() const { return x_; }
  std::span<const double> ys() const { return y_; }
  std::span<const double> zs() const { return z_; }

  /// Bytes held by a rule of this degree (node arrays plus the 1-D factors).
  static std::size_t predicted_bytes(int degree);
  std::size_t allocated_bytes() const;

 private:
  int degree_;
  std::size_t n_theta_;
  std::vector<double> cos_phi_, gl_weights_;
  std::vector<double> x_, y_, z_, w_;
};

/// Throws RuleTooCoarse unless rule.degree() >= required.
void require_degree(const SphereRule& rule, int required, const char* what);

/// Nodes t_k = 2 pi k / n with equal weights; exact for trig degree < n.
struct CircleRule {
  std::size_t n;
  explicit CircleRule(std::size_t n_nodes);
  double node(std::size_t k) const;
};

/// Weighted node sum with pairwise reduction. Throws std::domain_error naming
/// the node if f is not finite there.
double integrate_sphere(const std::function<double(const UnitVector&)>& f, const SphereRule& rule);
std::complex<double> integrate_sphere_complex(
    const std::function<std::complex<double>(const UnitVector&)>& f, const SphereRule& rule);

/// Pairwise sum of w_i * values[i] for values already tabulated on the rule nodes.
double integrate_tabulated(std::span<const double> values, const SphereRule& rule);
std::complex<double> integrate_tabulated(std::span<const std::complex<double>> values,
                                         const SphereRule& rule);

/// Scalar test function on S^2 or on the unit tangent bundle.
class Observable {
 public:
  enum class Kind { position, phase_space };
  using PositionFn = std::function<double(const UnitVector&)>;
  using PhaseFn = std::function<double(const UnitVector& x, const UnitVector& xi)>;

  static Observable position(std::string name, PositionFn f, int degree);
  static Observable phase_space(std::string name, PhaseFn f, int degree);

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  bool is_position() const { return kind_ == Kind::position; }
  /// Highest polynomial degree in x (and xi) that carries weight; drives rule choice.
  int degree() const { return degree_; }

  double operator()(const UnitVector& x, const UnitVector& xi) const { return f_(x, xi); }
  /// Position-only evaluation; throws std::logic_error for phase-space observables.
  double operator()(const UnitVector& x) const;

  /// a(R^T x, R^T xi): the observable transported by the rotation R.
  Observable rotated(const Rotation& r) const;

 private:
  Observable(std::string name, Kind kind, PhaseFn f, int degree)
      : name_(std::move(name)), kind_(kind), f_(std::move(f)), degree_(degree) {}
  std::string name_;
  Kind kind_;
  PhaseFn f_;
  int degree_;
};

/// The built-in observables: one, x3sq, x1x2, zonal4, xi3sq, x1sq_xi3sq.
std::vector<Observable> observable_bank();
/// Throws ConfigError if no bank observable has that name.
Observable bank_observable(const std::string& name);

/// (1/n) sum_k a(gamma(t_k), gamma'(t_k)). Requires n >= 4.
double circle_average(const OrientedGreatCircle& c, const Observable& a, std::size_t n = 256);

/// (1/4pi) integral over poles p of circle_average(G_p, a): the Liouville average.
double liouville_average(const Observable& a, const SphereRule& pole_rule, std::size_t n_circle = 256);
/// Same with the default pole rule of degree 40.
double liouville_average(const Observable& a);

}  // namespace beamqe
