#pragma once

// (r, phi)-lattices on a truncation disk, overlap indices, and the
// separated-subsequence partition with its counting index M_R.

#include <span>
#include <vector>

#include "json.hpp"

#include "dfock/potential.hpp"

namespace dfock {

struct Lattice {
  std::vector<cplx> points;
  std::vector<double> rho;  // rho at each point
  double r = 0.0;
  double domain_radius = 0.0;
  double candidate_spacing = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  int overlap_index = 0;
  double covering_certificate = 0.0;

  std::size_t size() const { return points.size(); }
  /// Probes z with |z| <= domain_radius - r * rho_max must be covered.
  double probe_radius() const { return domain_radius - r * rho_max; }
  nlohmann::json metadata() const;
};

struct RhoRange {
  double min = 0.0;
  double max = 0.0;
};

/// Extremes of rho over D(0, R), sampled on 65 radii (and 64 angles for
/// non-radial potentials).
RhoRange rho_range(const RadiusField& rf, double R);

struct LatticeOptions {
  /// Candidate spacing as a multiple of r * rho_min.
  double candidate_factor = 0.125;
  /// Probe spacing used for the certificate, relative to the candidate spacing.
  double probe_factor = 1.0;
};

/// Greedy maximal separated set: candidates on concentric rings of spacing
/// h = (r/8) min rho, swept by (|z|, arg z); a candidate is accepted when
/// |z - z_j| >= (r/2) min(rho(z), rho(z_j)) for every accepted z_j.
/// Throws ConvergenceError listing uncovered probes if the certificate is
/// below 1.
Lattice build_lattice(const RadiusField& rf, double r, double R_max, const LatticeOptions& opt = {});

struct CoverReport {
  std::size_t probes = 0;
  std::size_t covered = 0;
  int max_multiplicity = 0;
  std::vector<cplx> uncovered;  // first few
  double certificate() const {
    return probes == 0 ? 1.0 : static_cast<double>(covered) / static_cast<double>(probes);
  }
};

/// Square probe grid of the given spacing over |z| <= lat.probe_radius():
/// fraction covered by the closed disks D^r(z_j), and max multiplicity over
/// the probes and the lattice points.
CoverReport probe_cover(const Lattice& lat, double probe_spacing);

/// Max multiplicity of the closed disks D^r(z_j) over the probe grid.
int overlap_index(const Lattice& lat, double probe_spacing);

/// Exact max multiplicity of a finite family of closed disks, attained at a
/// center or at an intersection point of two boundary circles.
int exact_overlap_index(std::span<const cplx> centers, std::span<const double> radii);

/// max_j #{k : |z_j - z_k| < R min(rho(z_j), rho(z_k))}, self included.
int m_r_index(std::span<const cplx> points, double R, std::span<const double> rho);
int m_r_index(std::span<const cplx> points, double R, const RadiusField& rf);

/// Separated-subsequence partition: each class is built by repeatedly
/// taking the remaining point of least rho (lowest index on ties) that is
/// outside D^R of every point already taken; the rest are partitioned again.
/// Throws InputError on duplicate points.
std::vector<std::vector<std::size_t>> partition_separated(std::span<const cplx> points, double R,
                                                          std::span<const double> rho);
std::vector<std::vector<std::size_t>> partition_separated(std::span<const cplx> points, double R,
                                                          const RadiusField& rf);

/// Every pair in the class satisfies |z_j - z_k| >= R min(rho_j, rho_k).
bool is_separated(std::span<const cplx> points, std::span<const std::size_t> cls, double R,
                  std::span<const double> rho);

}  // namespace dfock
