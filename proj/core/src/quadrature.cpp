#include "beamqe/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "beamqe/errors.hpp"

namespace beamqe {

namespace {
constexpr double kPi = std::numbers::pi;
}

GaussLegendre gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussLegendre gl;
  gl.nodes.assign(n, 0.0);
  gl.weights.assign(n, 0.0);
  const double dn = double(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (double(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    // Recompute the derivative at the converged root for the weight.
    {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[n - 1 - i] = x;
    gl.nodes[i] = -x;
    gl.weights[n - 1 - i] = w;
    gl.weights[i] = w;
  }
  if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
  return gl;
}

SphereRule::SphereRule(int degree) : degree_(degree) {
  if (degree < 0) throw std::invalid_argument("SphereRule: degree must be >= 0");
  const std::size_t n_phi = std::max<std::size_t>(1, (static_cast<std::size_t>(degree) + 2) / 2);
  n_theta_ = static_cast<std::size_t>(degree) + 1;
  const GaussLegendre gl = gauss_legendre(n_phi);
  cos_phi_ = gl.nodes;
  gl_weights_ = gl.weights;
  const std::size_t total = n_phi * n_theta_;
  x_.resize(total);
  y_.resize(total);
  z_.resize(total);
  w_.resize(total);
  std::vector<double> ct(n_theta_), st(n_theta_);
  for (std::size_t j = 0; j < n_theta_; ++j) {
    const double th = 2.0 * kPi * double(j) / double(n_theta_);
    ct[j] = std::cos(th);
    st[j] = std::sin(th);
  }
  const double dtheta = 2.0 * kPi / double(n_theta_);
  for (std::size_t i = 0; i < n_phi; ++i) {
    const double z = cos_phi_[i];
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (std::size_t j = 0; j < n_theta_; ++j) {
      const std::size_t k = i * n_theta_ + j;
      x_[k] = r * ct[j];
      y_[k] = r * st[j];
      z_[k] = z;
      w_[k] = gl_weights_[i] * dtheta;
    }
  }
}

std::size_t SphereRule::predicted_bytes(int degree) {
  const auto n_phi = std::max<std::size_t>(1, (static_cast<std::size_t>(degree) + 2) / 2);
  const auto n_theta = static_cast<std::size_t>(degree) + 1;
  return 4 * sizeof(double) * n_phi * n_theta + 2 * sizeof(double) * n_phi;
}

std::size_t SphereRule::allocated_bytes() const {
  return sizeof(double) * (x_.capacity() + y_.capacity() + z_.capacity() + w_.capacity() +
                           cos_phi_.capacity() + gl_weights_.capacity());
}

void require_degree(const SphereRule& rule, int required, const char* what) {
  if (rule.degree() < required) {
    std::ostringstream os;
    os << what << ": quadrature rule of degree " << rule.degree() << " is too coarse (need >= "
       << required << ")";
    throw RuleTooCoarse(os.str());
  }
}

CircleRule::CircleRule(std::size_t n_nodes) : n(n_nodes) {
  if (n_nodes < 4) throw std::invalid_argument("CircleRule: need at least 4 nodes");
}

double CircleRule::node(std::size_t k) const { return 2.0 * kPi * double(k) / double(n); }

namespace {

template <typename T>
T integrate_impl(const std::function<T(const UnitVector&)>& f, const SphereRule& rule) {
  std::vector<T> terms(rule.size());
  parallel_for(rule.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const UnitVector x = rule.node(i);
      const T v = f(x);
      if (!std::isfinite(std::abs(v))) {
        std::ostringstream os;
        os.precision(17);
        os << "integrate_sphere: non-finite integrand at node " << i << " (" << x.x() << ", "
           << x.y() << ", " << x.z() << ")";
        throw std::domain_error(os.str());
      }
      terms[i] = rule.weight(i) * v;
    }
  });
  return pairwise_sum(terms);
}

template <typename T>
T integrate_tab_impl(std::span<const T> values, const SphereRule& rule) {
  if (values.size() != rule.size()) {
    throw std::invalid_argument("integrate_tabulated: value count does not match rule size");
  }
  std::vector<T> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = rule.weight(i) * values[i];
  return pairwise_sum(terms);
}

}  // namespace

double integrate_sphere(const std::function<double(const UnitVector&)>& f, const SphereRule& rule) {
  return integrate_impl<double>(f, rule);
}

std::complex<double> integrate_sphere_complex(
    const std::function<std::complex<double>(const UnitVector&)>& f, const SphereRule& rule) {
  return integrate_impl<std::complex<double>>(f, rule);
}

double integrate_tabulated(std::span<const double> values, const SphereRule& rule) {
  return integrate_tab_impl(values, rule);
}

std::complex<double> integrate_tabulated(std::span<const std::complex<double>> values,
                                         const SphereRule& rule) {
  return integrate_tab_impl(values, rule);
}

double circle_average(const OrientedGreatCircle& c, const Observable& a, std::size_t n) {
  const CircleRule rule(n);
  std::vector<double> vals(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = rule.node(k);
    vals[k] = a(c.point(t), c.tangent(t));
  }
  return pairwise_sum(vals) / double(n);
}

double liouville_average(const Observable& a, const SphereRule& pole_rule, std::size_t n_circle) {
  std::vector<double> terms(pole_rule.size());
  parallel_for(pole_rule.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const OrientedGreatCircle g(pole_rule.node(i));
      terms[i] = pole_rule.weight(i) * circle_average(g, a, n_circle);
    }
  });
  return pairwise_sum(terms) / (4.0 * kPi);
}

double liouville_average(const Observable& a) {
  static const SphereRule default_rule(40);
  return liouville_average(a, default_rule, 256);
}

}  // namespace beamqe
