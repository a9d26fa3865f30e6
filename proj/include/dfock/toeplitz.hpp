#pragma once

// Toeplitz matrices T_mn = int e_n conj(e_m) e^{-2 phi} dmu in a truncated
// basis, their spectra, Schatten norms and the kernel-action statistic.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "dfock/fock_basis.hpp"
#include "dfock/symbol_measure.hpp"

namespace dfock {

struct ToeplitzMatrix {
  Eigen::MatrixXcd matrix;
  /// Eigenvalues in descending order.
  std::vector<double> spectrum;
  nlohmann::json symbol;
  nlohmann::json basis;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
};

struct AssemblyOptions {
  MeasureQuadrature measure;
  /// Accepted: min eigenvalue >= -psd_tol * max eigenvalue.
  double psd_tol = 1e-9;
};

/// Options whose unbounded-density rule is the basis rule for (p, N).
AssemblyOptions default_assembly(const Potential& p, int N);

/// Assembles T_mu, symmetrised as (T + T*)/2. Atoms outside the trust radius
/// raise DomainError; a spectrum below the PSD tolerance raises
/// ConvergenceError (under-resolved quadrature).
ToeplitzMatrix assemble(const OrthonormalBasis& b, const SymbolMeasure& mu,
                        const AssemblyOptions& opt);

/// Wraps a Hermitian matrix (e.g. the identity) with its spectrum.
ToeplitzMatrix from_matrix(Eigen::MatrixXcd T);

/// Descending eigenvalues of a Hermitian matrix.
std::vector<double> eigenvalues(const Eigen::MatrixXcd& T);
double operator_norm(const ToeplitzMatrix& T);
/// sum_n max(lambda_n, 0)^p
double schatten_power(const ToeplitzMatrix& T, double p);
/// (sum_n max(lambda_n, 0)^p)^{1/p}
double schatten_norm(const ToeplitzMatrix& T, double p);
/// |S_p(T_N) - S_p(T_{N/2})|
double schatten_tail_estimate(const ToeplitzMatrix& T_full, const ToeplitzMatrix& T_half, double p);

/// <T f, f> for a coefficient vector f.
double quadratic_form(const ToeplitzMatrix& T, const Eigen::VectorXcd& f);
/// int |f|^2 e^{-2 phi} dmu for f = sum_n f_n e_n, on the same discretisation
/// that assemble() uses.
double measure_quadratic_form(const OrthonormalBasis& b, const SymbolMeasure& mu,
                              const Eigen::VectorXcd& f, const AssemblyOptions& opt);

/// max over z in the grid of ||T K_{p,z}||_{p,phi}, with K_{p,z} normalised
/// on the same local rule used for the outer norm.
double kernel_action_statistic(const ToeplitzMatrix& T, const OrthonormalBasis& b, double p,
                               std::span<const cplx> z_grid, const KernelRule& rule = {});

struct CompactnessReport {
  std::vector<double> spectrum_n;
  std::vector<double> spectrum_2n;
  std::size_t leading = 0;
  /// max relative change of the leading eigenvalues between N and 2N
  double leading_drift = 0.0;
  /// smallest / largest eigenvalue at 2N
  double tail_ratio = 0.0;
  bool flat = false;
  bool compact_signature = false;
  nlohmann::json to_json() const;
};

/// Leading eigenvalues are those of T_N at or above tail_fraction * lambda_1.
/// Flat: every eigenvalue of T_2N within 1e-6 of lambda_1. Compact
/// signature: leading drift below 1e-6 and tail ratio below tail_fraction.
CompactnessReport compactness_indicator(const ToeplitzMatrix& T_n, const ToeplitzMatrix& T_2n,
                                        double tail_fraction = 1e-3);

}  // namespace dfock
