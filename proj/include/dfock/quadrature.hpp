#pragma once

// Planar and radial integration rules. Every integral in the library goes
// through the rules defined here.

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dfock/parallel.hpp"
#include "dfock/types.hpp"

namespace dfock {

struct Node {
  cplx z;
  double w;
};

/// Gauss-Legendre nodes and weights on [0, 1]. Tables are cached.
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussLegendre& gauss_legendre01(int n);

enum class PlaneScheme { PolarTensor, CartesianGrid };

/// Quadrature rule for integrals over a truncation disk D(center, r_cut).
///
/// PolarTensor maps the radius as r = r_cut * t^2 with Gauss-Legendre in t
/// and uses the (half-offset) trapezoid rule in angle. CartesianGrid puts a
/// node at every cell center of a square grid of spacing h; the node weight
/// is the exact area of the cell clipped to the disk.
class PlaneRule {
 public:
  static PlaneRule polar(int n_radial, int n_angular, double r_cut, cplx center = 0.0,
                         double rotation = 0.0);
  static PlaneRule cartesian(double h, double r_cut, cplx center = 0.0);

  std::span<const Node> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  /// Same scheme with twice the resolution in every direction.
  PlaneRule refined() const;
  /// Same scheme and resolution about a new center.
  PlaneRule recentered(cplx center) const;
  PlaneRule rotated(double angle) const;

  PlaneScheme scheme() const { return scheme_; }
  int n_radial() const { return n_radial_; }
  int n_angular() const { return n_angular_; }
  double h() const { return h_; }
  double r_cut() const { return r_cut_; }
  cplx center() const { return center_; }
  double rotation() const { return rotation_; }

  /// Distinct node radii |z - center| (polar scheme only), in node order.
  std::span<const double> ring_radii() const { return rings_; }

 private:
  PlaneRule() = default;
  PlaneScheme scheme_ = PlaneScheme::PolarTensor;
  int n_radial_ = 0;
  int n_angular_ = 0;
  double h_ = 0.0;
  double r_cut_ = 0.0;
  cplx center_ = 0.0;
  double rotation_ = 0.0;
  std::vector<double> rings_;
  std::vector<Node> nodes_;
};

/// Tensor polar rule on a closed disk: Gauss-Legendre in r (with the r dr
/// Jacobian folded into the weights), half-offset trapezoid in angle.
class DiskRule {
 public:
  DiskRule(cplx center, double radius, int n_radial, int n_angular);

  std::span<const Node> nodes() const { return nodes_; }
  DiskRule refined() const { return {center_, radius_, 2 * n_radial_, 2 * n_angular_}; }
  cplx center() const { return center_; }
  double radius() const { return radius_; }
  int n_radial() const { return n_radial_; }
  int n_angular() const { return n_angular_; }

 private:
  cplx center_;
  double radius_;
  int n_radial_;
  int n_angular_;
  std::vector<Node> nodes_;
};

/// Value with an error estimate taken from two refinement levels.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {
[[noreturn]] void throw_poisoned(cplx z);

template <class T>
bool finite(const T& v) {
  if constexpr (std::is_same_v<T, cplx>)
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  else
    return std::isfinite(v);
}
}  // namespace detail

/// Weighted node sum, parallel with a fixed summation order.
/// Throws PoisonedIntegrand if f is not finite at some node.
template <class T = double, class F>
T integrate(std::span<const Node> nodes, F&& f) {
  return kernels::blocked_sum<T>(nodes.size(), [&](std::size_t i) {
    const T v = f(nodes[i].z);
    if (!detail::finite(v)) detail::throw_poisoned(nodes[i].z);
    return T(nodes[i].w * v);
  });
}

template <class T = double, class F>
T integrate(const PlaneRule& rule, F&& f) {
  return integrate<T>(rule.nodes(), std::forward<F>(f));
}

template <class T = double, class F>
T integrate(const DiskRule& rule, F&& f) {
  return integrate<T>(rule.nodes(), std::forward<F>(f));
}

/// Integral over the rule's truncation disk with an error estimate
/// |I(rule) - I(rule.refined())|. The value is the refined one.
Estimate integrate_plane(const std::function<double(cplx)>& f, const PlaneRule& rule);
Estimate integrate_disk(const std::function<double(cplx)>& f, const DiskRule& rule);

/// Refines a disk rule until two successive levels agree to rel_tol
/// (relative to the larger magnitude, with abs_floor as an absolute floor).
/// Throws ConvergenceError when max_radial is exceeded.
double integrate_disk_adaptive(const std::function<double(cplx)>& f, cplx center, double radius,
                               double rel_tol, int start_radial = 4, int start_angular = 8,
                               int max_radial = 512, double abs_floor = 0.0);

/// Integral of g(|w|) over D(c, radius) with |c| = center_distance: each
/// circle |w| = s contributes g(s) times its arc length inside the disk
/// (tanh-sinh quadrature, which absorbs the square-root endpoint behaviour).
double integrate_radial_disk(const std::function<double(double)>& g, double center_distance,
                             double radius, double rel_tol);

/// h_n = 2 pi * int_0^inf r^(2n+1) weight(r) dr for n = 0..n_max, each to
/// relative accuracy rel_tol. The tail beyond the automatically located
/// cutoff must be negligible, otherwise ConvergenceError names a larger one.
std::vector<double> radial_moments(const std::function<double(double)>& weight, int n_max,
                                   double rel_tol = 1e-12, double r_search_max = 200.0);

/// Radius R beyond which weight(r) * r^(2n+1) stays below rel * its maximum.
double radial_cutoff(const std::function<double(double)>& weight, int n, double rel = 1e-20,
                     double r_search_max = 200.0);

/// Exact area of the axis-aligned box [x0,x1]x[y0,y1] intersected with D(0, R).
double box_disk_area(double x0, double x1, double y0, double y1, double R);

/// Area of D(c1, r1) intersected with D(c2, r2).
double lens_area(cplx c1, double r1, cplx c2, double r2);

}  // namespace dfock
