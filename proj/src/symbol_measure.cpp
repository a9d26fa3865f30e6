#include "dfock/symbol_measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfock {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// int over D(c, rho) intersected with D(s, R) of f dA, polar about c with
// every ray clipped to the support disk. The angle range is split where a ray
// becomes tangent to the support circle or crosses the intersection of the two
// circles; each piece uses Gauss-Legendre under a sine map that absorbs the
// square-root behaviour of the ray length at the piece ends.
double clipped_disk_integral(const std::function<double(cplx)>& f, cplx c, double rho, cplx s,
                             double R, int n_radial, int n_angular) {
  const auto& gl = gauss_legendre01(n_radial);
  const cplx d = c - s;
  const double D = std::abs(d);
  const double dd = std::norm(d) - R * R;
  auto ray = [&](double theta) {
    const cplx u = std::polar(1.0, theta);
    const double b = (d * std::conj(u)).real();
    const double disc = b * b - dd;
    if (disc <= 0.0) return 0.0;
    const double sq = std::sqrt(disc);
    const double t0 = std::max(0.0, -b - sq);
    const double t1 = std::min(rho, -b + sq);
    if (t1 <= t0) return 0.0;
    double acc = 0.0;
    for (int i = 0; i < n_radial; ++i) {
      const double t = t0 + (t1 - t0) * gl.x[i];
      acc += gl.w[i] * t * f(c + t * u);
    }
    return acc * (t1 - t0);
  };

  std::vector<double> cuts;
  if (D > 0.0) {
    const double toward = std::arg(-d);
    if (D > R) {
      const double a = std::asin(R / D);
      cuts.push_back(toward - a);
      cuts.push_back(toward + a);
    }
    const double cosv = (rho * rho + D * D - R * R) / (2.0 * rho * D);
    if (std::abs(cosv) < 1.0) {
      const double a = std::acos(cosv);
      cuts.push_back(toward - a);
      cuts.push_back(toward + a);
    }
  }
  if (cuts.empty()) {
    const double dtheta = 2.0 * kPi / n_angular;
    double total = 0.0;
    for (int k = 0; k < n_angular; ++k) total += ray(dtheta * (k + 0.5));
    return total * dtheta;
  }
  for (double& t : cuts) t = std::fmod(std::fmod(t, 2.0 * kPi) + 2.0 * kPi, 2.0 * kPi);
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(cuts.front() + 2.0 * kPi);
  const auto& ga = gauss_legendre01(n_angular);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], span = cuts[k + 1] - cuts[k];
    if (span <= 0.0) continue;
    double piece = 0.0;
    for (int i = 0; i < n_angular; ++i) {
      // theta = lo + span (1 - cos(pi x)) / 2
      const double x = ga.x[i];
      const double theta = lo + 0.5 * span * (1.0 - std::cos(kPi * x));
      piece += ga.w[i] * ray(theta) * 0.5 * span * kPi * std::sin(kPi * x);
    }
    total += piece;
  }
  return total;
}

double density_disk_mass(const SymbolMeasure::Density& d, cplx center, double radius,
                         double rel_tol) {
  if (d.exact_disk_mass) return d.exact_disk_mass(center, radius);
  const double gap = std::abs(center - d.center);
  if (std::isfinite(d.support_radius)) {
    if (gap >= radius + d.support_radius) return 0.0;
    const bool inside = gap + radius <= d.support_radius;
    if (!inside) {
      int nr = 8, na = 16;
      double prev = clipped_disk_integral(d.w, center, radius, d.center, d.support_radius, nr, na);
      while (nr < 1024) {
        nr *= 2;
        na *= 2;
        const double cur =
            clipped_disk_integral(d.w, center, radius, d.center, d.support_radius, nr, na);
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur) + 1e-300) return cur;
        prev = cur;
      }
      throw ConvergenceError("clipped density disk mass did not converge");
    }
  }
  return integrate_disk_adaptive(d.w, center, radius, rel_tol, 8, 16, 1024, 1e-300);
}

}  // namespace

SymbolMeasure SymbolMeasure::atoms(std::vector<cplx> points, std::vector<double> masses) {
  if (points.size() != masses.size()) throw InputError("atoms need one mass per point");
  for (double m : masses)
    if (!(m >= 0.0) || !std::isfinite(m)) throw InputError("atom masses must be finite and >= 0");
  return SymbolMeasure(Atomic{std::move(points), std::move(masses)});
}

SymbolMeasure SymbolMeasure::dirac(cplx point, double mass) { return atoms({point}, {mass}); }

SymbolMeasure SymbolMeasure::area() {
  Density d;
  d.name = "area";
  d.w = [](cplx) { return 1.0; };
  d.exact_disk_mass = [](cplx, double r) { return kPi * r * r; };
  d.rotation_invariant = true;
  return SymbolMeasure(std::move(d));
}

SymbolMeasure SymbolMeasure::gaussian_density(double beta) {
  if (!(beta > 0.0)) throw InputError("gaussian_density needs beta > 0");
  Density d;
  d.name = "gaussian_density";
  d.w = [beta](cplx z) { return std::exp(-beta * std::norm(z)); };
  d.support_radius = std::sqrt(46.0 / beta);
  d.rotation_invariant = true;
  d.params = {{"beta", beta}};
  return SymbolMeasure(std::move(d));
}

SymbolMeasure SymbolMeasure::indicator_disk(cplx center, double radius) {
  if (!(radius > 0.0)) throw InputError("indicator_disk needs a positive radius");
  Density d;
  d.name = "indicator_disk";
  d.w = [](cplx) { return 1.0; };
  d.center = center;
  d.support_radius = radius;
  d.exact_disk_mass = [center, radius](cplx z, double r) {
    return lens_area(z, r, center, radius);
  };
  d.rotation_invariant = center == cplx(0.0);
  d.params = {{"center", {center.real(), center.imag()}}, {"radius", radius}};
  return SymbolMeasure(std::move(d));
}

SymbolMeasure SymbolMeasure::power_density(double k, double support_radius) {
  if (!(k >= 0.0) || !(support_radius > 0.0))
    throw InputError("power_density needs k >= 0 and a positive support radius");
  Density d;
  d.name = "power_density";
  d.w = [k](cplx z) { return std::pow(std::abs(z), k); };
  d.support_radius = support_radius;
  d.rotation_invariant = true;
  d.params = {{"k", k}, {"support_radius", support_radius}};
  return SymbolMeasure(std::move(d));
}

SymbolMeasure SymbolMeasure::density(Density d) {
  if (!d.w) throw InputError("density symbol needs a density function");
  return SymbolMeasure(std::move(d));
}

SymbolMeasure SymbolMeasure::scaled(double c, SymbolMeasure inner) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InputError("scale factor must be finite and >= 0");
  return SymbolMeasure(Scaled{c, std::make_shared<const SymbolMeasure>(std::move(inner))});
}

SymbolMeasure SymbolMeasure::sum(std::vector<SymbolMeasure> terms) {
  return SymbolMeasure(Sum{std::move(terms)});
}

double SymbolMeasure::disk_mass(cplx center, double radius, double rel_tol) const {
  if (!(radius > 0.0)) throw InputError("measure_disk_mass needs a positive radius");
  return std::visit(
      overloaded{
          [&](const Atomic& a) {
            double m = 0.0;
            for (std::size_t i = 0; i < a.points.size(); ++i)
              if (std::abs(a.points[i] - center) <= radius) m += a.masses[i];
            return m;
          },
          [&](const Density& d) { return density_disk_mass(d, center, radius, rel_tol); },
          [&](const Scaled& s) { return s.c * s.inner->disk_mass(center, radius, rel_tol); },
          [&](const Sum& s) {
            double m = 0.0;
            for (const auto& t : s.terms) m += t.disk_mass(center, radius, rel_tol);
            return m;
          }},
      v_);
}

bool SymbolMeasure::rotation_invariant() const {
  return std::visit(overloaded{[](const Atomic& a) {
                                 for (std::size_t i = 0; i < a.points.size(); ++i)
                                   if (a.points[i] != cplx(0.0) && a.masses[i] != 0.0) return false;
                                 return true;
                               },
                               [](const Density& d) { return d.rotation_invariant; },
                               [](const Scaled& s) { return s.inner->rotation_invariant(); },
                               [](const Sum& s) {
                                 for (const auto& t : s.terms)
                                   if (!t.rotation_invariant()) return false;
                                 return true;
                               }},
                    v_);
}

std::vector<std::pair<cplx, double>> SymbolMeasure::all_atoms() const {
  std::vector<std::pair<cplx, double>> out;
  std::visit(overloaded{[&](const Atomic& a) {
                          for (std::size_t i = 0; i < a.points.size(); ++i)
                            out.emplace_back(a.points[i], a.masses[i]);
                        },
                        [](const Density&) {},
                        [&](const Scaled& s) {
                          for (auto [z, m] : s.inner->all_atoms()) out.emplace_back(z, s.c * m);
                        },
                        [&](const Sum& s) {
                          for (const auto& t : s.terms)
                            for (auto pr : t.all_atoms()) out.push_back(pr);
                        }},
             v_);
  return out;
}

double SymbolMeasure::support_extent() const {
  return std::visit(overloaded{[](const Atomic& a) {
                                 double e = 0.0;
                                 for (cplx z : a.points) e = std::max(e, std::abs(z));
                                 return e;
                               },
                               [](const Density& d) {
                                 return std::abs(d.center) + d.support_radius;
                               },
                               [](const Scaled& s) { return s.inner->support_extent(); },
                               [](const Sum& s) {
                                 double e = 0.0;
                                 for (const auto& t : s.terms) e = std::max(e, t.support_extent());
                                 return e;
                               }},
                    v_);
}

nlohmann::json SymbolMeasure::descriptor() const {
  return std::visit(
      overloaded{[](const Atomic& a) {
                   nlohmann::json pts = nlohmann::json::array();
                   for (std::size_t i = 0; i < a.points.size(); ++i)
                     pts.push_back({a.points[i].real(), a.points[i].imag(), a.masses[i]});
                   return nlohmann::json{{"type", "atoms"}, {"atoms", pts}};
                 },
                 [](const Density& d) {
                   nlohmann::json j{{"type", "density"}, {"name", d.name}};
                   if (!d.params.is_null()) j["params"] = d.params;
                   return j;
                 },
                 [](const Scaled& s) {
                   return nlohmann::json{{"type", "scaled"}, {"c", s.c}, {"inner", s.inner->descriptor()}};
                 },
                 [](const Sum& s) {
                   nlohmann::json terms = nlohmann::json::array();
                   for (const auto& t : s.terms) terms.push_back(t.descriptor());
                   return nlohmann::json{{"type", "sum"}, {"terms", terms}};
                 }},
      v_);
}

void DiscreteMeasure::append(const DiscreteMeasure& other, double scale) {
  z.insert(z.end(), other.z.begin(), other.z.end());
  for (double v : other.w) w.push_back(scale * v);
}

DiscreteMeasure discretize(const SymbolMeasure& mu, const MeasureQuadrature& q, cplx focus) {
  return std::visit(
      overloaded{
          [&](const SymbolMeasure::Atomic& a) {
            DiscreteMeasure d;
            d.z = a.points;
            d.w = a.masses;
            return d;
          },
          [&](const SymbolMeasure::Density& dens) {
            DiscreteMeasure d;
            auto push = [&](std::span<const Node> nodes, bool clip) {
              for (const auto& n : nodes) {
                if (clip && std::abs(n.z - dens.center) > dens.support_radius) continue;
                d.z.push_back(n.z);
                d.w.push_back(n.w * dens.w(n.z));
              }
            };
            if (std::isfinite(dens.support_radius)) {
              const DiskRule rule(dens.center, dens.support_radius, q.support_radial,
                                  q.support_angular);
              push(rule.nodes(), false);
            } else {
              if (!q.unbounded)
                throw InputError("density '" + dens.name +
                                 "' has unbounded support but no plane rule was supplied");
              push(q.unbounded->recentered(focus).nodes(), false);
            }
            return d;
          },
          [&](const SymbolMeasure::Scaled& s) {
            DiscreteMeasure d;
            d.append(discretize(*s.inner, q, focus), s.c);
            return d;
          },
          [&](const SymbolMeasure::Sum& s) {
            DiscreteMeasure d;
            for (const auto& t : s.terms) d.append(discretize(t, q, focus));
            return d;
          }},
      mu.variant());
}

double averaging_transform(const SymbolMeasure& mu, const RadiusField& rf, double r, cplx z) {
  if (!(r > 0.0)) throw InputError("averaging transform needs r > 0");
  const double rho = rf(z);
  const double rr = r * rho;
  return mu.disk_mass(z, rr) / (kPi * rr * rr);
}

}  // namespace dfock
