#include "dfock/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/graph/compressed_sparse_row_graph.hpp>
#include <boost/graph/dijkstra_shortest_paths.hpp>

namespace dfock {

namespace {
using Graph = boost::compressed_sparse_row_graph<boost::directedS, boost::no_property,
                                                 boost::property<boost::edge_weight_t, double>>;
}

GeodesicGrid::GeodesicGrid(const RadiusField& rf, cplx lower_left, cplx upper_right,
                           std::optional<double> spacing)
    : lo_(lower_left) {
  const double wx = upper_right.real() - lower_left.real();
  const double wy = upper_right.imag() - lower_left.imag();
  if (!(wx > 0.0) || !(wy > 0.0)) throw InputError("geodesic grid needs a nonempty rectangle");
  if (spacing) {
    h_ = *spacing;
  } else {
    std::vector<cplx> probe;
    constexpr int kProbe = 17;
    for (int i = 0; i < kProbe; ++i)
      for (int j = 0; j < kProbe; ++j)
        probe.emplace_back(lower_left.real() + wx * i / (kProbe - 1),
                           lower_left.imag() + wy * j / (kProbe - 1));
    const auto r = rf.at(probe);
    h_ = *std::min_element(r.begin(), r.end()) / 8.0;
  }
  if (!(h_ > 0.0)) throw InputError("geodesic grid spacing must be positive");
  nx_ = static_cast<std::size_t>(std::floor(wx / h_ + 1e-9)) + 1;
  ny_ = static_cast<std::size_t>(std::floor(wy / h_ + 1e-9)) + 1;

  std::vector<cplx> pts(size());
  for (std::size_t i = 0; i < size(); ++i) pts[i] = node(i);
  rho_ = rf.at(pts);

  const int di[] = {1, 0, 1, 1};
  const int dj[] = {0, 1, 1, -1};
  for (std::size_t j = 0; j < ny_; ++j)
    for (std::size_t i = 0; i < nx_; ++i) {
      const std::size_t a = j * nx_ + i;
      for (int d = 0; d < 4; ++d) {
        const auto ii = static_cast<std::ptrdiff_t>(i) + di[d];
        const auto jj = static_cast<std::ptrdiff_t>(j) + dj[d];
        if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(nx_) ||
            jj >= static_cast<std::ptrdiff_t>(ny_))
          continue;
        const std::size_t b = static_cast<std::size_t>(jj) * nx_ + static_cast<std::size_t>(ii);
        const double len = h_ * std::hypot(di[d], dj[d]);
        const double w = len * 2.0 / (rho_[a] + rho_[b]);
        edges_.emplace_back(a, b);
        weights_.push_back(w);
        edges_.emplace_back(b, a);
        weights_.push_back(w);
      }
    }
}

cplx GeodesicGrid::node(std::size_t i) const {
  return lo_ + cplx(static_cast<double>(i % nx_) * h_, static_cast<double>(i / nx_) * h_);
}

std::size_t GeodesicGrid::index_of(cplx z) const {
  const double fx = (z.real() - lo_.real()) / h_;
  const double fy = (z.imag() - lo_.imag()) / h_;
  const double eps = 1e-9;
  if (fx < -eps || fy < -eps || fx > static_cast<double>(nx_ - 1) + eps ||
      fy > static_cast<double>(ny_ - 1) + eps) {
    std::ostringstream os;
    os << "point (" << z.real() << ", " << z.imag() << ") lies outside the geodesic grid";
    throw DomainError(os.str());
  }
  const auto i = static_cast<std::size_t>(std::clamp(std::lround(fx), 0L, static_cast<long>(nx_ - 1)));
  const auto j = static_cast<std::size_t>(std::clamp(std::lround(fy), 0L, static_cast<long>(ny_ - 1)));
  return j * nx_ + i;
}

std::vector<double> GeodesicGrid::distances_from(cplx z) const {
  const std::size_t src = index_of(z);
  Graph g(boost::edges_are_unsorted_multi_pass, edges_.begin(), edges_.end(), weights_.begin(),
          size());
  std::vector<double> dist(size());
  boost::dijkstra_shortest_paths(
      g, src,
      boost::distance_map(boost::make_iterator_property_map(dist.begin(), get(boost::vertex_index, g))));
  return dist;
}

std::vector<double> GeodesicGrid::distances(cplx z, std::span<const cplx> targets) const {
  std::vector<std::size_t> idx;
  for (cplx w : targets) idx.push_back(index_of(w));
  const auto all = distances_from(z);
  std::vector<double> out;
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

double GeodesicGrid::distance(cplx z, cplx w) const {
  const std::size_t target = index_of(w);
  if (index_of(z) == target) return 0.0;
  return distances_from(z)[target];
}

}  // namespace dfock
