#pragma once

// Truncated orthonormal bases of F^2_phi built over monomials, the
// reproducing kernel they induce, kernel p-norms and the Bergman projection.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "dfock/geodesic.hpp"
#include "dfock/potential.hpp"
#include "dfock/quadrature.hpp"

namespace dfock {

enum class BasisPath {
  Auto,  // diagonal fast path for radial weights, Gram/Cholesky otherwise
  Gram   // always orthogonalise the monomial Gram matrix
};

class OrthonormalBasis {
 public:
  int degree() const { return degree_; }
  std::size_t dim() const { return static_cast<std::size_t>(degree_) + 1; }
  const Potential& potential() const { return p_; }
  /// True for the radial fast path (C diagonal, C_nn = h_n^{-1/2}).
  bool diagonal() const { return diagonal_; }

  /// out[n] = e_n(z), n = 0..N
  void eval(cplx z, std::span<cplx> out) const;
  Eigen::VectorXcd eval(cplx z) const;
  /// out[n] = e_n(z) e^{-phi(z)}
  void eval_weighted(cplx z, std::span<cplx> out) const;

  /// Row n holds the monomial coefficients of e_n (lower triangular).
  Eigen::MatrixXcd coefficients() const;
  /// h_n = ||z^n||^2_phi (radial path only; empty otherwise).
  const std::vector<double>& monomial_norms() const { return h_; }
  double trust_radius() const { return trust_radius_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Share of K_z(z) carried by the top tenth of the basis indices.
  double tail_fraction(cplx z) const;

  nlohmann::json to_json() const;
  /// Rebuilds a basis written by to_json(). The potential descriptor in
  /// the document must match p.
  static OrthonormalBasis from_json(const nlohmann::json& j, const Potential& p);

 private:
  friend OrthonormalBasis build_basis(const Potential&, int, const PlaneRule&, BasisPath);
  OrthonormalBasis() = default;
  void set_radial(int N);
  void compute_trust_radius();

  Potential p_ = Potential::gaussian(1.0);
  int degree_ = 0;
  bool diagonal_ = true;
  std::vector<double> h_;
  std::vector<double> ratio_;         // sqrt(h_{n-1} / h_n), radial path
  std::vector<double> mono_scale_;    // 1 / sqrt(G_kk), Gram path
  Eigen::MatrixXcd lower_inv_;        // inverse Cholesky factor of the scaled Gram matrix
  double trust_radius_ = 0.0;
  std::vector<std::string> warnings_;
};

/// Default truncation radius for degree N: where e^{-2 phi(R)} R^(2N+1)
/// falls below 1e-20 of its maximum (worst ray for non-radial weights).
double default_cutoff(const Potential& p, int N);

/// Polar rule with the default cutoff, resolving degree-2N integrands.
PlaneRule basis_rule(const Potential& p, int N, int n_radial = 0, int n_angular = 0);

/// Orthonormal basis of polynomials of degree <= N in F^2_phi. The rule is
/// used by the Gram path only. A numerically non-positive-definite Gram
/// matrix at degree k truncates the basis to degree k-1 with a warning.
OrthonormalBasis build_basis(const Potential& p, int N, const PlaneRule& rule,
                             BasisPath path = BasisPath::Auto);

enum class KernelMode {
  Auto,      // closed form when the potential has one
  Truncated  // always sum over the basis
};

/// Reproducing kernel K_z(w) = sum_n e_n(w) conj(e_n(z)), or the closed form
/// (alpha/pi) e^{alpha w conj(z)} for Gaussian weights.
class Kernel {
 public:
  explicit Kernel(OrthonormalBasis basis, KernelMode mode = KernelMode::Auto);

  /// K_z(w). On the truncated path both points must lie within the trust radius.
  cplx operator()(cplx z, cplx w) const;
  cplx eval_unchecked(cplx z, cplx w) const;
  /// K_z(z) = ||K_z||_2^2
  double diagonal(cplx z) const;
  /// |K_z(w)| e^{-phi(w)}
  double weighted_abs(cplx z, cplx w) const;
  /// |K_{2,z}(w)|^2 e^{-2 phi(w)}
  double berezin_density(cplx z, cplx w) const;

  bool exact() const { return exact_; }
  const OrthonormalBasis& basis() const { return basis_; }
  const Potential& potential() const { return basis_.potential(); }
  double trust_radius() const;
  /// Throws DomainError when z is outside the trusted region.
  void check_trusted(cplx z) const;

 private:
  OrthonormalBasis basis_;
  bool exact_ = false;
  double alpha_ = 0.0;
};

/// Local rule for kernel integrals: polar, centered at z.
struct KernelRule {
  int n_radial = 96;
  int n_angular = 128;
  double radius = 10.0;
  PlaneRule at(cplx z) const { return PlaneRule::polar(n_radial, n_angular, radius, z); }
};

/// ||K_z||_{p,phi} = (int |K_z e^{-phi}|^p dA)^{1/p}; p = infinity gives the
/// sup over the rule's nodes (a lower bound of the true sup).
double kernel_norm(const Kernel& k, double p, cplx z, const KernelRule& rule = {});

/// K_{p,z} = K_z / ||K_z||_{p,phi}
struct NormalizedKernel {
  const Kernel* kernel;
  cplx z;
  double p;
  double norm;
  cplx operator()(cplx w) const { return kernel->eval_unchecked(z, w) / norm; }
  /// Coefficients over the basis: conj(e_n(z)) / norm.
  Eigen::VectorXcd coefficients() const;
};
NormalizedKernel normalized_kernel(const Kernel& k, double p, cplx z, const KernelRule& rule = {});

/// c_n = <f, e_n>_phi, the coefficients of P_phi f over the basis.
Eigen::VectorXcd bergman_project(const OrthonormalBasis& b, const std::function<cplx(cplx)>& f,
                                 const PlaneRule& rule);

/// Evaluates sum_n c_n e_n(z).
cplx synthesize(const OrthonormalBasis& b, const Eigen::VectorXcd& c, cplx z);

struct DecayFit {
  bool feasible = false;
  double epsilon = 0.0;
  double C = 0.0;
  /// (epsilon, minimal log C) over the search grid.
  std::vector<std::pair<double, double>> table;
};

/// Largest epsilon in {0.05, ..., 3.0} such that
///   |K_z(w)| rho(z) rho(w) e^{-phi(z)-phi(w)} <= C exp(-d_phi(z,w)^epsilon)
/// holds on the far grid for some C <= c_cap.
DecayFit decay_fit(const Kernel& k, const RadiusField& rf, const GeodesicGrid& g, cplx z,
                   std::span<const cplx> far_points, double c_cap = 1e3);

/// Largest r <= 1/2 on {0.05, 0.10, ...} for which
/// |K_z(w)| / (||K_z||_2 ||K_w||_2) lies in [1/window, window] for all
/// sampled w in D^r(z), z among the centers. Returns 0 if none qualifies.
/// The scan stops at the first r whose sample disks leave the trust radius.
double near_diagonal_radius(const Kernel& k, const RadiusField& rf, std::span<const cplx> centers,
                            double window = 5.0);

}  // namespace dfock
