#include "dfock/potential.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

// needed by boost pchip
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/roots.hpp>

#include "dfock/parallel.hpp"
#include "dfock/quadrature.hpp"

namespace dfock {

Potential Potential::gaussian(double alpha) {
  if (!(alpha > 0.0)) throw InputError("GaussianAlpha needs alpha > 0");
  Potential p;
  p.kind_ = PotentialKind::GaussianAlpha;
  p.alpha_ = alpha;
  p.max_radius_ = std::numeric_limits<double>::infinity();
  p.phi_ = [alpha](cplx z) { return 0.5 * alpha * std::norm(z); };
  p.lap_ = [alpha](cplx) { return 2.0 * alpha; };
  p.descriptor_ = {{"kind", "gaussian"}, {"alpha", alpha}};
  return p;
}

Potential Potential::radial_power(double m, double scale) {
  if (!(m >= 1.0) || !(scale > 0.0)) throw InputError("RadialPower needs m >= 1 and scale > 0");
  Potential p;
  p.kind_ = PotentialKind::RadialPower;
  p.max_radius_ = std::numeric_limits<double>::infinity();
  p.phi_ = [m, scale](cplx z) { return scale * std::pow(std::abs(z), m); };
  if (m == 2.0)
    p.lap_ = [scale](cplx) { return 4.0 * scale; };
  else if (m == 4.0)
    p.lap_ = [scale](cplx z) { return 16.0 * scale * std::norm(z); };
  else
    p.lap_ = [m, scale](cplx z) { return scale * m * m * std::pow(std::abs(z), m - 2.0); };
  p.descriptor_ = {{"kind", "radial_power"}, {"m", m}, {"scale", scale}};
  return p;
}

Potential Potential::custom_radial(std::vector<double> r, std::vector<double> phi,
                                   std::vector<double> laplacian) {
  using boost::math::interpolators::pchip;
  if (r.size() < 4 || r.size() != phi.size() || r.size() != laplacian.size())
    throw InputError("radial profile needs at least 4 rows of (r, phi, laplacian)");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw InputError("radial profile radii must be strictly increasing");
  if (r.front() != 0.0) throw InputError("radial profile must start at r = 0");
  for (double v : laplacian)
    if (v < 0.0) throw InputError("radial profile has a negative Laplacian");
  const double rmax = r.back();
  const std::size_t rows = r.size();
  auto rphi = r;
  auto phi_i = std::make_shared<pchip<std::vector<double>>>(std::move(rphi), std::move(phi));
  auto lap_i = std::make_shared<pchip<std::vector<double>>>(std::move(r), std::move(laplacian));
  Potential p;
  p.kind_ = PotentialKind::CustomRadial;
  p.max_radius_ = rmax;
  auto check = [rmax](double s) {
    if (s > rmax) {
      std::ostringstream os;
      os << "radius " << s << " is beyond the tabulated profile (r <= " << rmax << ")";
      throw DomainError(os.str());
    }
  };
  p.phi_ = [phi_i, check](cplx z) {
    const double s = std::abs(z);
    check(s);
    return (*phi_i)(s);
  };
  p.lap_ = [lap_i, check](cplx z) {
    const double s = std::abs(z);
    check(s);
    return std::max(0.0, (*lap_i)(s));
  };
  p.descriptor_ = {{"kind", "custom_radial"}, {"rows", rows}, {"r_max", rmax}};
  return p;
}

Potential Potential::custom_general(std::string name, std::function<double(cplx)> phi,
                                    std::function<double(cplx)> laplacian,
                                    bool verify_consistency) {
  if (!phi || !laplacian) throw InputError("custom potential needs both phi and its Laplacian");
  Potential p;
  p.kind_ = PotentialKind::CustomGeneral;
  p.max_radius_ = std::numeric_limits<double>::infinity();
  p.phi_ = std::move(phi);
  p.lap_ = std::move(laplacian);
  p.descriptor_ = {{"kind", "custom_general"}, {"name", std::move(name)}};
  if (verify_consistency) {
    const double dev = laplacian_consistency(p);
    if (dev > 1e-3) {
      std::ostringstream os;
      os << "supplied Laplacian disagrees with the finite-difference Laplacian of phi "
         << "(relative deviation " << dev << ")";
      throw InputError(os.str());
    }
  }
  return p;
}

std::optional<double> Potential::gaussian_alpha() const {
  if (kind_ == PotentialKind::GaussianAlpha) return alpha_;
  return std::nullopt;
}

std::string Potential::name() const {
  switch (kind_) {
    case PotentialKind::GaussianAlpha: return "gaussian";
    case PotentialKind::RadialPower: return "radial_power";
    case PotentialKind::CustomRadial: return "custom_radial";
    case PotentialKind::CustomGeneral: return "custom_general";
  }
  return "unknown";
}

double laplacian_consistency(const Potential& p, double extent, int n, double step) {
  std::vector<double> fd, exact;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx z(-extent + 2.0 * extent * i / (n - 1), -extent + 2.0 * extent * j / (n - 1));
      const double c = p.phi(z);
      const double l = p.phi(z + step) + p.phi(z - step) + p.phi(z + cplx(0, step)) +
                       p.phi(z - cplx(0, step)) - 4.0 * c;
      fd.push_back(l / (step * step));
      exact.push_back(p.laplacian(z));
    }
  double scale = 0.0;
  for (double v : exact) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t k = 0; k < fd.size(); ++k) {
    const double denom = std::max(std::abs(exact[k]), 1e-2 * scale);
    if (denom > 0.0) worst = std::max(worst, std::abs(fd[k] - exact[k]) / denom);
  }
  return worst;
}

double disk_mass(const Potential& p, cplx center, double radius, const GeometryTolerances& tol) {
  if (!(radius > 0.0)) throw InputError("disk_mass needs a positive radius");
  if (p.radial())
    return integrate_radial_disk([&p](double s) { return p.laplacian(cplx(s, 0.0)); }, std::abs(center),
                                 radius, tol.mass_tol);
  auto f = [&p](cplx w) { return p.laplacian(w); };
  return integrate_disk_adaptive(f, center, radius, tol.mass_tol, 4, 8, 512, 1e-300);
}

double radius(const Potential& p, cplx z, double bracket_hint, const GeometryTolerances& tol) {
  double h = bracket_hint > 0.0 ? bracket_hint : 0.5;
  auto mass = [&](double r) { return disk_mass(p, z, r, tol); };
  double lo = 0.0, hi = 0.0;
  double m = mass(h);
  int steps = 0;
  if (m < 1.0) {
    while (m < 1.0) {
      if (++steps > tol.bracket_doublings || h * 2.0 > p.max_radius() + std::abs(z)) {
        std::ostringstream os;
        os << "measure too thin: Laplacian mass of D(z, r) stays below 1 up to r = " << h
           << " at z = (" << z.real() << ", " << z.imag() << ")";
        throw ConvergenceError(os.str());
      }
      h *= 2.0;
      m = mass(h);
    }
    lo = 0.5 * h;
    hi = h;
  } else {
    while (m >= 1.0) {
      if (++steps > tol.bracket_doublings) {
        throw ConvergenceError("measure too concentrated: could not bracket the radius below");
      }
      h *= 0.5;
      m = mass(h);
    }
    lo = h;
    hi = 2.0 * h;
  }
  const double rtol = tol.radius_tol;
  auto done = [rtol](double a, double b) { return std::abs(b - a) <= rtol * std::min(a, b); };
  auto [a, b] = boost::math::tools::bisect([&](double r) { return mass(r) - 1.0; }, lo, hi, done);
  return 0.5 * (a + b);
}

RadiusField::RadiusField(Potential p, std::span<const cplx> points, double bracket_hint,
                         GeometryTolerances tol)
    : p_(std::move(p)), hint_(bracket_hint), tol_(tol) {
  std::vector<Key> keys;
  std::vector<cplx> reps;
  std::unordered_map<Key, std::size_t, KeyHash> seen;
  for (cplx z : points) {
    const Key k = key(z);
    if (seen.emplace(k, keys.size()).second) {
      keys.push_back(k);
      reps.push_back(z);
    }
  }
  const auto vals =
      kernels::parallel_map<double>(reps.size(), [&](std::size_t i) { return solve(reps[i]); });
  cache_.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) cache_.emplace(keys[i], vals[i]);
}

RadiusField::Key RadiusField::key(cplx z) const {
  if (p_.radial()) return {std::bit_cast<std::uint64_t>(std::abs(z)), 0};
  return {std::bit_cast<std::uint64_t>(z.real()), std::bit_cast<std::uint64_t>(z.imag())};
}

double RadiusField::solve(cplx z) const {
  // Radial potentials: solve at the point on the positive real axis.
  const cplx at = p_.radial() ? cplx(std::abs(z), 0.0) : z;
  return radius(p_, at, hint_, tol_);
}

double RadiusField::operator()(cplx z) const {
  const auto it = cache_.find(key(z));
  if (it != cache_.end()) return it->second;
  return solve(z);
}

std::vector<double> RadiusField::at(std::span<const cplx> zs) const {
  std::vector<double> out(zs.size(), 0.0);
  std::unordered_map<Key, std::size_t, KeyHash> pending;
  std::vector<cplx> reps;
  std::vector<std::size_t> slot(zs.size());
  constexpr std::size_t kCached = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const Key k = key(zs[i]);
    const auto it = cache_.find(k);
    if (it != cache_.end()) {
      out[i] = it->second;
      slot[i] = kCached;
      continue;
    }
    auto [pit, fresh] = pending.emplace(k, reps.size());
    if (fresh) reps.push_back(zs[i]);
    slot[i] = pit->second;
  }
  const auto vals =
      kernels::parallel_map<double>(reps.size(), [&](std::size_t i) { return solve(reps[i]); });
  for (std::size_t i = 0; i < zs.size(); ++i)
    if (slot[i] != kCached) out[i] = vals[slot[i]];
  return out;
}

double doubling_constant(const Potential& p, std::span<const cplx> centers,
                         std::span<const double> radii, const GeometryTolerances& tol) {
  if (centers.empty() || radii.empty()) throw InputError("doubling_constant needs samples");
  double worst = 0.0;
  for (cplx z : centers)
    for (double r : radii) {
      const double small = disk_mass(p, z, r, tol);
      if (!(small > 0.0)) throw Error("degenerate mass: mu(D(z, r)) = 0 for a sampled disk");
      worst = std::max(worst, disk_mass(p, z, 2.0 * r, tol) / small);
    }
  return worst;
}

ChristFit christ_fit_masses(std::span<const DiskPair> pairs, std::span<const double> mass_big,
                            std::span<const double> mass_small) {
  constexpr double kSlack = 1e-6;  // quadrature noise allowance on the C lattice
  ChristFit fit;
  int best_k = std::numeric_limits<int>::max();
  for (int d = 1; d <= 19; ++d) {
    const double delta = 0.05 * d;
    double cmin = 1.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double q = pairs[i].small_radius / pairs[i].big_radius;
      const double lower = std::pow(q, 1.0 / delta) * mass_big[i] / mass_small[i];
      const double upper = mass_small[i] / (std::pow(q, delta) * mass_big[i]);
      cmin = std::max({cmin, lower, upper});
    }
    fit.frontier.emplace_back(delta, cmin);
    const int k = static_cast<int>(std::ceil(20.0 * std::log10(cmin * (1.0 - kSlack)) - 1e-12));
    const int kk = std::max(0, k);
    if (kk > 120) continue;
    if (kk <= best_k) {  // ties go to the larger delta
      best_k = kk;
      fit.feasible = true;
      fit.C = std::pow(10.0, kk / 20.0);
      fit.delta = delta;
    }
  }
  return fit;
}

ChristFit christ_fit(const Potential& p, std::span<const DiskPair> pairs,
                     const GeometryTolerances& tol) {
  if (pairs.empty()) throw InputError("christ_fit needs disk pairs");
  std::vector<double> big(pairs.size()), small(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pr = pairs[i];
    if (!(pr.small_radius < pr.big_radius))
      throw InputError("christ_fit pairs need r' < r");
    if (std::abs(pr.big_center - pr.small_center) >= pr.big_radius + pr.small_radius)
      throw InputError("christ_fit pairs must intersect");
    big[i] = disk_mass(p, pr.big_center, pr.big_radius, tol);
    small[i] = disk_mass(p, pr.small_center, pr.small_radius, tol);
  }
  return christ_fit_masses(pairs, big, small);
}

}  // namespace dfock
