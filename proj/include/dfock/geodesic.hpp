#pragma once

#include <optional>
#include <vector>

#include "dfock/potential.hpp"

namespace dfock {

/// Rectangular 8-neighbour grid carrying the conformal metric
/// |dz| / rho(z). Edge weights use the average of 1/rho at the endpoints
/// (|segment| * 2 / (rho(a) + rho(b))). Shortest paths give an upper bound
/// for the geodesic distance d_phi that converges as the spacing shrinks.
class GeodesicGrid {
 public:
  /// Spacing defaults to (min rho over the rectangle) / 8.
  GeodesicGrid(const RadiusField& rf, cplx lower_left, cplx upper_right,
               std::optional<double> spacing = std::nullopt);

  double distance(cplx z, cplx w) const;
  /// Distances from z to every node, in node order.
  std::vector<double> distances_from(cplx z) const;
  /// Distances from z to each target (one Dijkstra run).
  std::vector<double> distances(cplx z, std::span<const cplx> targets) const;

  std::size_t index_of(cplx z) const;
  cplx node(std::size_t i) const;
  std::size_t size() const { return nx_ * ny_; }
  double spacing() const { return h_; }
  double rho_at(std::size_t i) const { return rho_[i]; }

 private:
  cplx lo_;
  double h_ = 0.0;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<double> rho_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<double> weights_;
};

}  // namespace dfock
