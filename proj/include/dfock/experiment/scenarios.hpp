#pragma once

// Verification scenarios: geometry, carleson, toeplitz, schatten, trace.
// Each returns a Report; run_all executes them one after another.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dfock/experiment/config.hpp"
#include "dfock/experiment/report.hpp"
#include "dfock/fock_basis.hpp"
#include "dfock/lattice.hpp"
#include "dfock/toeplitz.hpp"
#include "dfock/transforms.hpp"

namespace dfock::experiment {

/// Points of the square grid step * (i + i j) with |z| <= radius.
std::vector<cplx> square_grid(double radius, double step);

/// Polar sample of the annuli: rings at the midpoint and edges of every
/// annulus, 64 points each.
std::vector<cplx> annulus_points(std::span<const double> edges);

/// Complex coefficients with independent standard normal real and
/// imaginary parts scaled by 1/sqrt(2) (unit variance).
Eigen::VectorXcd random_coefficients(std::mt19937_64& rng, std::size_t dim);

/// Objects shared by the scenarios for one configuration and degree.
struct Workspace {
  Workspace(const Config& c, int degree);

  const Config* config;
  PlaneRule rule;        // basis rule
  OrthonormalBasis basis;
  Kernel kernel;
  PlaneRule sigma_rule;  // polar rule on D(0, domain_radius)
  std::vector<cplx> sigma_points;
  std::vector<cplx> z_grid;
  std::vector<cplx> annulus;
  RadiusField rf;
  AssemblyOptions assembly;
  BerezinOptions berezin;
};

/// The four quantities of the Schatten equivalence for one exponent:
/// (a) ||T||_{S_p}^p, (b) int mu-hat_r^p d sigma, (c) int mu-tilde^p d sigma,
/// (d) sum_j mu-hat_r(z_j)^p over the lattice.
struct SchattenQuantities {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double operator[](int i) const { return i == 0 ? a : i == 1 ? b : i == 2 ? c : d; }
};

struct SymbolFields {
  TransformField averaging_sigma;  // mu-hat_r on the sigma rule
  TransformField berezin_sigma;    // mu-tilde on the sigma rule
  TransformField averaging_lattice;
};

SymbolFields symbol_fields(const Workspace& w, const SymbolMeasure& mu, const Lattice& lat);
SchattenQuantities schatten_quantities(const Workspace& w, const ToeplitzMatrix& T,
                                       const SymbolFields& f, double p);

/// Sum over atoms of mass * K_N(z, z) e^{-2 phi(z)}, the trace of T_mu for atomic mu.
double atomic_trace_oracle(const OrthonormalBasis& b, const SymbolMeasure& mu);

struct RunOptions {
  std::filesystem::path out_dir = "out";
};

Report run_geometry(const Config& c, const RunOptions& o);
Report run_carleson(const Config& c, const RunOptions& o);
Report run_toeplitz(const Config& c, const RunOptions& o);
Report run_schatten(const Config& c, const RunOptions& o);
Report run_trace(const Config& c, const RunOptions& o);

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"geometry", "carleson", "toeplitz", "schatten",
                                                 "trace"};
  return names;
}

/// Runs one named scenario and writes its report (plus CSV dumps) to o.out_dir.
Report run_scenario(const std::string& name, const Config& c, const RunOptions& o);

}  // namespace dfock::experiment
