#include "dfock/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/legendre.hpp>

namespace dfock {

namespace detail {
void throw_poisoned(cplx z) {
  std::ostringstream os;
  os << "integrand is not finite at node (" << z.real() << ", " << z.imag() << ")";
  throw PoisonedIntegrand(os.str());
}
}  // namespace detail

const GaussLegendre& gauss_legendre01(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  if (n < 1) throw InputError("Gauss-Legendre rule needs at least one node");
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const auto zeros = boost::math::legendre_p_zeros<double>(n);  // nonnegative half
  std::vector<std::pair<double, double>> xw;
  for (double x : zeros) {
    const double dp = boost::math::legendre_p_prime(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    xw.emplace_back(x, w);
    if (x != 0.0) xw.emplace_back(-x, w);
  }
  std::sort(xw.begin(), xw.end());
  GaussLegendre gl;
  for (auto [x, w] : xw) {
    gl.x.push_back(0.5 * (x + 1.0));
    gl.w.push_back(0.5 * w);
  }
  return cache.emplace(n, std::move(gl)).first->second;
}

PlaneRule PlaneRule::polar(int n_radial, int n_angular, double r_cut, cplx center,
                           double rotation) {
  if (n_radial < 1 || n_angular < 1 || !(r_cut > 0.0))
    throw InputError("polar rule needs positive node counts and truncation radius");
  PlaneRule rule;
  rule.scheme_ = PlaneScheme::PolarTensor;
  rule.n_radial_ = n_radial;
  rule.n_angular_ = n_angular;
  rule.r_cut_ = r_cut;
  rule.center_ = center;
  rule.rotation_ = rotation;
  const auto& gl = gauss_legendre01(n_radial);
  const double dtheta = 2.0 * kPi / n_angular;
  rule.nodes_.reserve(static_cast<std::size_t>(n_radial) * n_angular);
  for (int i = 0; i < n_radial; ++i) {
    const double t = gl.x[i];
    const double r = r_cut * t * t;
    const double wr = gl.w[i] * 2.0 * r_cut * r_cut * t * t * t * dtheta;
    rule.rings_.push_back(r);
    for (int k = 0; k < n_angular; ++k) {
      const double theta = rotation + dtheta * (k + 0.5);
      rule.nodes_.push_back({center + std::polar(r, theta), wr});
    }
  }
  return rule;
}

PlaneRule PlaneRule::cartesian(double h, double r_cut, cplx center) {
  if (!(h > 0.0) || !(r_cut > 0.0))
    throw InputError("cartesian rule needs positive spacing and truncation radius");
  PlaneRule rule;
  rule.scheme_ = PlaneScheme::CartesianGrid;
  rule.h_ = h;
  rule.r_cut_ = r_cut;
  rule.center_ = center;
  const int m = static_cast<int>(std::ceil(r_cut / h));
  for (int i = -m; i < m; ++i)
    for (int j = -m; j < m; ++j) {
      const double x0 = i * h, y0 = j * h;
      const double a = box_disk_area(x0, x0 + h, y0, y0 + h, r_cut);
      if (a > 0.0) rule.nodes_.push_back({center + cplx(x0 + 0.5 * h, y0 + 0.5 * h), a});
    }
  return rule;
}

PlaneRule PlaneRule::refined() const {
  if (scheme_ == PlaneScheme::PolarTensor)
    return polar(2 * n_radial_, 2 * n_angular_, r_cut_, center_, rotation_);
  return cartesian(0.5 * h_, r_cut_, center_);
}

PlaneRule PlaneRule::recentered(cplx center) const {
  if (scheme_ == PlaneScheme::PolarTensor)
    return polar(n_radial_, n_angular_, r_cut_, center, rotation_);
  return cartesian(h_, r_cut_, center);
}

PlaneRule PlaneRule::rotated(double angle) const {
  if (scheme_ != PlaneScheme::PolarTensor)
    throw InputError("only polar rules can be rotated");
  return polar(n_radial_, n_angular_, r_cut_, center_, rotation_ + angle);
}

DiskRule::DiskRule(cplx center, double radius, int n_radial, int n_angular)
    : center_(center), radius_(radius), n_radial_(n_radial), n_angular_(n_angular) {
  if (!(radius > 0.0)) throw InputError("disk rule needs a positive radius");
  const auto& gl = gauss_legendre01(n_radial);
  const double dtheta = 2.0 * kPi / n_angular;
  nodes_.reserve(static_cast<std::size_t>(n_radial) * n_angular);
  for (int i = 0; i < n_radial; ++i) {
    const double r = radius * gl.x[i];
    const double wr = gl.w[i] * radius * r * dtheta;
    for (int k = 0; k < n_angular; ++k)
      nodes_.push_back({center + std::polar(r, dtheta * (k + 0.5)), wr});
  }
}

Estimate integrate_plane(const std::function<double(cplx)>& f, const PlaneRule& rule) {
  const double coarse = integrate(rule, f);
  const double fine = integrate(rule.refined(), f);
  return {fine, std::abs(fine - coarse)};
}

Estimate integrate_disk(const std::function<double(cplx)>& f, const DiskRule& rule) {
  const double coarse = integrate(rule, f);
  const double fine = integrate(rule.refined(), f);
  return {fine, std::abs(fine - coarse)};
}

double integrate_disk_adaptive(const std::function<double(cplx)>& f, cplx center, double radius,
                               double rel_tol, int start_radial, int start_angular,
                               int max_radial, double abs_floor) {
  DiskRule rule(center, radius, start_radial, start_angular);
  double prev = integrate(rule, f);
  while (rule.n_radial() < max_radial) {
    rule = rule.refined();
    const double cur = integrate(rule, f);
    if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), std::abs(prev)) + abs_floor)
      return cur;
    prev = cur;
  }
  std::ostringstream os;
  os << "disk quadrature did not converge on D((" << center.real() << ", " << center.imag()
     << "), " << radius << ") to relative tolerance " << rel_tol;
  throw ConvergenceError(os.str());
}

double integrate_radial_disk(const std::function<double(double)>& g, double d, double R,
                             double rel_tol) {
  if (!(R > 0.0) || !(d >= 0.0)) throw InputError("radial disk integral needs radius > 0");
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  auto ring = [&g](double s) { return g(s) * s; };
  double total = 0.0;
  const double inner = R - d;
  if (inner > 0.0) total += 2.0 * kPi * ts.integrate(ring, 0.0, inner, rel_tol * 1e-2);
  if (d > 0.0) {
    auto arc = [&](double s) {
      const double c = std::clamp((s * s + d * d - R * R) / (2.0 * s * d), -1.0, 1.0);
      return 2.0 * std::acos(c) * ring(s);
    };
    total += ts.integrate(arc, std::abs(inner), d + R, rel_tol * 1e-2);
  }
  return total;
}

double radial_cutoff(const std::function<double(double)>& weight, int n, double rel,
                     double r_search_max) {
  constexpr int kSteps = 20000;
  const double dr = r_search_max / kSteps;
  const double log_rel = std::log(rel);
  std::vector<double> lg(kSteps + 1);
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 1; i <= kSteps; ++i) {
    const double r = i * dr;
    const double w = weight(r);
    lg[i] = w > 0.0 ? (2.0 * n + 1.0) * std::log(r) + std::log(w)
                    : -std::numeric_limits<double>::infinity();
    if (lg[i] > best) {
      best = lg[i];
      best_i = i;
    }
  }
  if (!std::isfinite(best)) return dr;  // weight vanishes on the search range
  for (int i = best_i; i <= kSteps; ++i) {
    if (lg[i] - best < log_rel) {
      bool stays = true;
      for (int j = i; j <= kSteps; ++j)
        if (lg[j] - best >= log_rel) {
          stays = false;
          break;
        }
      if (stays) return i * dr;
    }
  }
  std::ostringstream os;
  os << "radial tail not resolved within r <= " << r_search_max << " for moment " << n
     << "; try a cutoff of at least " << 2.0 * r_search_max;
  throw ConvergenceError(os.str());
}

std::vector<double> radial_moments(const std::function<double(double)>& weight, int n_max,
                                   double rel_tol, double r_search_max) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> h(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    const double R = radial_cutoff(weight, n, 1e-20, r_search_max);
    auto f = [&](double r) {
      const double w = weight(r);
      return w == 0.0 ? 0.0 : std::exp((2.0 * n + 1.0) * std::log(r)) * w;
    };
    double err = 0.0;
    const double val = gauss_kronrod<double, 61>::integrate(f, 0.0, R, 20, rel_tol * 1e-2, &err);
    if (!std::isfinite(val)) throw PoisonedIntegrand("radial moment is not finite");
    if (val != 0.0 && err > rel_tol * std::abs(val)) {
      std::ostringstream os;
      os << "radial moment " << n << " reached only relative error " << err / std::abs(val);
      throw ConvergenceError(os.str());
    }
    h[static_cast<std::size_t>(n)] = 2.0 * kPi * val;
  }
  return h;
}

namespace {
// antiderivative of sqrt(R^2 - x^2)
double semicircle_primitive(double x, double R) {
  x = std::clamp(x, -R, R);
  return 0.5 * (x * std::sqrt(std::max(0.0, R * R - x * x)) + R * R * std::asin(x / R));
}
}  // namespace

double box_disk_area(double x0, double x1, double y0, double y1, double R) {
  const double a = std::max(x0, -R), b = std::min(x1, R);
  if (a >= b || y0 >= y1) return 0.0;
  std::vector<double> cuts{a, b};
  for (double y : {y0, y1})
    if (std::abs(y) < R) {
      const double x = std::sqrt(R * R - y * y);
      for (double c : {-x, x})
        if (c > a && c < b) cuts.push_back(c);
    }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double u = cuts[k], v = cuts[k + 1];
    if (v <= u) continue;
    const double xm = 0.5 * (u + v);
    const double sm = std::sqrt(std::max(0.0, R * R - xm * xm));
    const bool top_is_s = sm < y1;
    const bool bottom_is_s = -sm > y0;
    const double top = top_is_s ? sm : y1;
    const double bottom = bottom_is_s ? -sm : y0;
    if (top <= bottom) continue;
    const double S = semicircle_primitive(v, R) - semicircle_primitive(u, R);
    const double len = v - u;
    area += (top_is_s ? S : y1 * len) - (bottom_is_s ? -S : y0 * len);
  }
  return area;
}

double lens_area(cplx c1, double r1, cplx c2, double r2) {
  const double d = std::abs(c1 - c2);
  if (d >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2);
  if (d <= std::abs(r1 - r2)) return kPi * rmin * rmin;
  // half chord and signed distances from each center to the chord
  const double h = 0.5 / d * std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) *
                                                         (d + r1 + r2)));
  const double x1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
  const double x2 = d - x1;
  auto segment = [](double r, double a) {
    const double t = 2.0 * a;
    const double t_minus_sin =
        t < 1e-2 ? t * t * t / 6.0 * (1.0 - t * t / 20.0 * (1.0 - t * t / 42.0)) : t - std::sin(t);
    return 0.5 * r * r * t_minus_sin;
  };
  return segment(r1, std::atan2(h, x1)) + segment(r2, std::atan2(h, x2));
}

}  // namespace dfock
