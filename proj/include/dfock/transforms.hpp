#pragma once

// Berezin transforms of measures and operators, r-averaging fields, the two
// trace functionals and L^p(d sigma) norms, with d sigma = dA / rho^2.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "dfock/fock_basis.hpp"
#include "dfock/symbol_measure.hpp"

namespace dfock {

struct TransformField {
  std::vector<cplx> points;
  std::vector<double> values;
  nlohmann::json meta;

  std::size_t size() const { return points.size(); }
  double min() const;
  double max() const;
};

struct BerezinOptions {
  MeasureQuadrature measure;
  BerezinOptions() { measure.unbounded = PlaneRule::polar(96, 128, 10.0); }
};

/// mu-tilde(z) = int |K_{2,z}(w)|^2 e^{-2 phi(w)} dmu(w).
/// On the truncated kernel path, z and every atom must lie within the trust
/// radius; offending atoms are listed in the DomainError.
double berezin_measure(const Kernel& k, const SymbolMeasure& mu, cplx z,
                       const BerezinOptions& opt = {});

/// mu-tilde on a list of points. Terms of a Sum are evaluated separately and
/// rotation-invariant terms over a radial potential are evaluated once per |z|.
TransformField berezin_field(const Kernel& k, const SymbolMeasure& mu, std::span<const cplx> points,
                             const BerezinOptions& opt = {});

/// mu-hat_r on a list of points, with the same term splitting and memoisation.
TransformField averaging_field(const SymbolMeasure& mu, const RadiusField& rf, double r,
                               std::span<const cplx> points);
/// Same with rho supplied per point; radial states whether rho depends on |z| only.
TransformField averaging_field(const SymbolMeasure& mu, double r, std::span<const cplx> points,
                               std::span<const double> rho, bool radial);

/// T-tilde(z) = v* T v with v_n = conj(e_n(z)) / ||K_z||_2 (truncated norm).
double berezin_operator(const Eigen::MatrixXcd& T, const OrthonormalBasis& b, cplx z);
TransformField berezin_operator_field(const Eigen::MatrixXcd& T, const OrthonormalBasis& b,
                                      std::span<const cplx> points);

/// sum_n T_nn
double trace_exact(const Eigen::MatrixXcd& T);

struct TraceReport {
  double matrix_trace = 0.0;
  /// int T-tilde(z) ||K_z||_2^2 e^{-2 phi(z)} dA(z), equal to tr T.
  double integral = 0.0;
  /// int T-tilde(z) d sigma(z)
  double sigma_integral = 0.0;
  /// sigma_integral / matrix_trace
  double sigma_ratio = 0.0;
  /// |integral - matrix_trace| / |matrix_trace|
  double agreement = 0.0;
};

TraceReport trace_integral(const Eigen::MatrixXcd& T, const OrthonormalBasis& b,
                           const PlaneRule& rule, const RadiusField& rf);

/// points of the field in the order of rule nodes; InputError otherwise.
std::vector<cplx> node_points(const PlaneRule& rule);

/// int |field|^p d sigma over the rule the field was sampled on.
double sigma_lp_power(const TransformField& f, double p, const RadiusField& rf,
                      const PlaneRule& rule);
/// (int |field|^p d sigma)^{1/p}
double sigma_lp_norm(const TransformField& f, double p, const RadiusField& rf,
                     const PlaneRule& rule);

struct VanishingReport {
  std::vector<double> edges;
  std::vector<double> sups;
  double global_sup = 0.0;
  bool vanishing = false;
  nlohmann::json to_json() const;
};

inline constexpr double kVanishTol = 1e-3;

/// Sup of the field over each annulus edges[k] <= |z| < edges[k+1]. The field
/// is flagged vanishing when the last three sups strictly decrease (or have
/// reached exactly zero) and the final one is below vanish_tol times the
/// global sup.
VanishingReport vanishing_detector(const TransformField& f, std::span<const double> edges,
                                   double vanish_tol = kVanishTol);

}  // namespace dfock
