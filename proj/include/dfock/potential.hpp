#pragma once

// The subharmonic weight phi with doubling Laplacian, and the geometry it
// induces: disk masses, the radius function rho, doubling and Christ
// constants, and the area measure dA / rho^2.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "dfock/types.hpp"

namespace dfock {

enum class PotentialKind { GaussianAlpha, RadialPower, CustomRadial, CustomGeneral };

/// Weight phi together with the density of its Laplacian (the doubling
/// measure Delta phi with respect to area measure). Immutable.
class Potential {
 public:
  /// phi = alpha |z|^2 / 2, Delta phi = 2 alpha.
  static Potential gaussian(double alpha);
  /// phi = scale |z|^m, Delta phi = scale m^2 |z|^(m-2). Requires m >= 1.
  static Potential radial_power(double m, double scale = 1.0);
  /// Tabulated radial profile (r, phi(r), Delta phi(r)), interpolated by
  /// piecewise cubic Hermite splines. Evaluation beyond the last radius
  /// throws DomainError.
  static Potential custom_radial(std::vector<double> r, std::vector<double> phi,
                                 std::vector<double> laplacian);
  /// Arbitrary smooth weight. The supplied Laplacian is checked against a
  /// 5-point finite-difference Laplacian of phi on a coarse grid.
  static Potential custom_general(std::string name, std::function<double(cplx)> phi,
                                  std::function<double(cplx)> laplacian,
                                  bool verify_consistency = true);

  double phi(cplx z) const { return phi_(z); }
  double laplacian(cplx z) const { return lap_(z); }
  /// e^{-phi(z)}
  double weight(cplx z) const { return std::exp(-phi_(z)); }

  PotentialKind kind() const { return kind_; }
  bool radial() const { return kind_ != PotentialKind::CustomGeneral; }
  std::optional<double> gaussian_alpha() const;
  /// Largest |z| where phi is defined (finite only for tabulated profiles).
  double max_radius() const { return max_radius_; }

  nlohmann::json descriptor() const { return descriptor_; }
  std::string name() const;

 private:
  Potential() = default;
  PotentialKind kind_ = PotentialKind::GaussianAlpha;
  std::function<double(cplx)> phi_;
  std::function<double(cplx)> lap_;
  double alpha_ = 0.0;
  double max_radius_ = 0.0;
  nlohmann::json descriptor_;
};

/// Largest relative deviation between the supplied Laplacian and a 5-point
/// finite-difference Laplacian of phi on an n x n grid over [-extent, extent]^2.
double laplacian_consistency(const Potential& p, double extent = 2.0, int n = 7,
                             double step = 1e-3);

struct GeometryTolerances {
  double mass_tol = 1e-8;     // relative, disk masses
  double radius_tol = 1e-10;  // relative, bisection for rho
  int bracket_doublings = 60;
};

/// (Delta phi)(D(center, radius)). Radial weights reduce to a 1D integral over
/// circles about the origin; other weights use adaptive polar quadrature.
double disk_mass(const Potential& p, cplx center, double radius,
                 const GeometryTolerances& tol = {});

/// The unique r with (Delta phi)(D(z, r)) = 1: geometric bracketing from
/// bracket_hint followed by bisection. Throws ConvergenceError
/// ("measure too thin") when the bracket cannot be closed.
double radius(const Potential& p, cplx z, double bracket_hint = 0.5,
              const GeometryTolerances& tol = {});

/// Radius function cache. Points passed at construction are solved once
/// (in parallel); lookups never mutate the object, so it can be shared
/// read-only across threads. Radial potentials are keyed on |z|.
class RadiusField {
 public:
  explicit RadiusField(Potential p, std::span<const cplx> points = {},
                       double bracket_hint = 0.5, GeometryTolerances tol = {});

  double operator()(cplx z) const;
  /// rho at many points; unseen points are solved in parallel, with
  /// radial deduplication, but not added to the cache.
  std::vector<double> at(std::span<const cplx> zs) const;

  /// 1 / rho(z)^2, the density of d sigma = dA / rho^2.
  double sigma_weight(cplx z) const {
    const double r = (*this)(z);
    return 1.0 / (r * r);
  }

  const Potential& potential() const { return p_; }
  const GeometryTolerances& tolerances() const { return tol_; }
  double bracket_hint() const { return hint_; }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  struct Key {
    std::uint64_t a = 0, b = 0;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<std::uint64_t>{}(k.a * 0x9e3779b97f4a7c15ULL ^ k.b);
    }
  };
  Key key(cplx z) const;
  double solve(cplx z) const;

  Potential p_;
  double hint_;
  GeometryTolerances tol_;
  std::unordered_map<Key, double, KeyHash> cache_;
};

/// Lower bound for the doubling constant: max over samples of
/// mu(D(z, 2r)) / mu(D(z, r)). Throws Error on a zero denominator.
double doubling_constant(const Potential& p, std::span<const cplx> centers,
                         std::span<const double> radii, const GeometryTolerances& tol = {});

/// Pair of intersecting disks D = D(big_center, big_radius) and
/// D' = D(small_center, small_radius) with small_radius < big_radius.
struct DiskPair {
  cplx big_center;
  double big_radius;
  cplx small_center;
  double small_radius;
};

struct ChristFit {
  bool feasible = false;
  double C = 0.0;
  double delta = 0.0;
  /// Minimal C (before rounding to the search lattice) for every delta.
  std::vector<std::pair<double, double>> frontier;
};

/// Smallest (C, delta) on the search lattice delta in {0.05, ..., 0.95},
/// C in {10^(k/20)} up to 1e6 such that
///   C^-1 (r'/r)^(1/delta) mu(D) <= mu(D') <= C (r'/r)^delta mu(D)
/// for every pair. C is minimised first, then delta is maximised.
ChristFit christ_fit(const Potential& p, std::span<const DiskPair> pairs,
                     const GeometryTolerances& tol = {});

/// Same fit from precomputed masses (mass_big[i] = mu(D_i), mass_small[i] = mu(D'_i)).
ChristFit christ_fit_masses(std::span<const DiskPair> pairs, std::span<const double> mass_big,
                            std::span<const double> mass_small);

}  // namespace dfock
