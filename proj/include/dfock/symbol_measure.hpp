#pragma once

// Positive planar measures used as Toeplitz symbols, their disk masses and
// r-averaging transforms.

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dfock/potential.hpp"
#include "dfock/quadrature.hpp"

namespace dfock {

class SymbolMeasure {
 public:
  struct Atomic {
    std::vector<cplx> points;
    std::vector<double> masses;
  };
  /// w dA restricted to the closed disk D(center, support_radius).
  /// An infinite support radius means the whole plane.
  struct Density {
    std::string name;
    std::function<double(cplx)> w;
    cplx center = 0.0;
    double support_radius = std::numeric_limits<double>::infinity();
    /// Closed form for the mass of D(z, r), when one exists.
    std::function<double(cplx, double)> exact_disk_mass;
    /// Density depends on |z - center| only.
    bool rotation_invariant = false;
    nlohmann::json params;
  };
  struct Scaled {
    double c;
    std::shared_ptr<const SymbolMeasure> inner;
  };
  struct Sum {
    std::vector<SymbolMeasure> terms;
  };
  using Variant = std::variant<Atomic, Density, Scaled, Sum>;

  static SymbolMeasure atoms(std::vector<cplx> points, std::vector<double> masses);
  static SymbolMeasure dirac(cplx point, double mass = 1.0);
  /// Area measure dA on the whole plane.
  static SymbolMeasure area();
  /// e^{-beta |z|^2} dA, truncated where the density drops below 1e-20.
  static SymbolMeasure gaussian_density(double beta);
  /// dA restricted to D(center, radius).
  static SymbolMeasure indicator_disk(cplx center, double radius);
  /// |z|^k dA on D(0, support_radius).
  static SymbolMeasure power_density(double k, double support_radius);
  static SymbolMeasure density(Density d);
  static SymbolMeasure scaled(double c, SymbolMeasure inner);
  static SymbolMeasure sum(std::vector<SymbolMeasure> terms);

  const Variant& variant() const { return v_; }

  /// mu(closed disk D(center, radius)).
  double disk_mass(cplx center, double radius, double rel_tol = 1e-12) const;
  /// Invariant under rotations about the origin.
  bool rotation_invariant() const;
  /// Every atom (recursively), with masses multiplied through Scaled.
  std::vector<std::pair<cplx, double>> all_atoms() const;
  /// Largest |z| of the support (infinity for unbounded densities).
  double support_extent() const;
  nlohmann::json descriptor() const;

 private:
  explicit SymbolMeasure(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Node counts for discretising densities.
struct MeasureQuadrature {
  int support_radial = 96;
  int support_angular = 192;
  /// Rule used for densities with unbounded support. Its center is
  /// replaced by the focus point passed to discretize().
  std::optional<PlaneRule> unbounded;
};

/// Weighted point cloud realising integration against a measure:
/// int f dmu ~ sum_i w_i f(z_i). Atoms are exact.
struct DiscreteMeasure {
  std::vector<cplx> z;
  std::vector<double> w;
  void append(const DiscreteMeasure& other, double scale = 1.0);
  std::size_t size() const { return z.size(); }
};

DiscreteMeasure discretize(const SymbolMeasure& mu, const MeasureQuadrature& q,
                           cplx focus = 0.0);

/// mu-hat_r(z) = mu(D(z, r rho(z))) / (pi r^2 rho(z)^2).
double averaging_transform(const SymbolMeasure& mu, const RadiusField& rf, double r, cplx z);

}  // namespace dfock
