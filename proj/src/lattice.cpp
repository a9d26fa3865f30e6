#include "dfock/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dfock/parallel.hpp"

namespace dfock {

namespace {

class CellGrid {
 public:
  CellGrid(double extent, double cell) : lo_(-extent), cell_(cell) {
    n_ = static_cast<long>(std::ceil(2.0 * extent / cell)) + 1;
    cells_.resize(static_cast<std::size_t>(n_ * n_));
  }
  void insert(std::uint32_t idx, cplx z) { cells_[slot(ix(z.real()), ix(z.imag()))].push_back(idx); }
  /// Calls f(idx) for every entry in the cells within distance d of z.
  template <class F>
  void near(cplx z, double d, F&& f) const {
    const long x0 = ix(z.real() - d), x1 = ix(z.real() + d);
    const long y0 = ix(z.imag() - d), y1 = ix(z.imag() + d);
    for (long y = y0; y <= y1; ++y)
      for (long x = x0; x <= x1; ++x)
        for (const auto idx : cells_[slot(x, y)]) f(idx);
  }

 private:
  long ix(double v) const {
    return std::clamp(static_cast<long>(std::floor((v - lo_) / cell_)), 0L, n_ - 1);
  }
  std::size_t slot(long x, long y) const { return static_cast<std::size_t>(y * n_ + x); }
  double lo_, cell_;
  long n_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;
};

void check_distinct(std::span<const cplx> points) {
  std::vector<cplx> sorted(points.begin(), points.end());
  auto less = [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  };
  std::sort(sorted.begin(), sorted.end(), less);
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    std::ostringstream os;
    os << "duplicate point " << *dup;
    throw InputError(os.str());
  }
}

}  // namespace

nlohmann::json Lattice::metadata() const {
  return {{"r", r},
          {"R_max", domain_radius},
          {"N_r", overlap_index},
          {"points", points.size()},
          {"candidate_spacing", candidate_spacing},
          {"rho_min", rho_min},
          {"rho_max", rho_max},
          {"covering_certificate", covering_certificate}};
}

RhoRange rho_range(const RadiusField& rf, double R) {
  constexpr int kRadii = 64;
  const int angles = rf.potential().radial() ? 1 : 64;
  std::vector<cplx> pts;
  for (int k = 0; k <= kRadii; ++k)
    for (int a = 0; a < angles; ++a) pts.push_back(std::polar(R * k / kRadii, 2.0 * kPi * a / angles));
  const auto rho = rf.at(pts);
  const auto [lo, hi] = std::minmax_element(rho.begin(), rho.end());
  return {*lo, *hi};
}

Lattice build_lattice(const RadiusField& rf, double r, double R_max, const LatticeOptions& opt) {
  if (!(r > 0.0) || !(R_max > 0.0)) throw InputError("lattice needs r > 0 and R_max > 0");
  if (R_max > rf.potential().max_radius())
    throw DomainError("lattice domain exceeds the range of the potential");
  Lattice lat;
  lat.r = r;
  lat.domain_radius = R_max;
  const RhoRange range = rho_range(rf, R_max);
  lat.rho_min = range.min;
  lat.rho_max = range.max;
  const double h = opt.candidate_factor * r * range.min;
  lat.candidate_spacing = h;

  const long rings = static_cast<long>(std::floor(R_max / h));
  std::vector<long> ring_count(rings + 1);
  std::vector<std::size_t> ring_start(rings + 2, 0);
  ring_count[0] = 1;
  for (long k = 1; k <= rings; ++k) ring_count[k] = static_cast<long>(std::ceil(2.0 * kPi * k));
  for (long k = 0; k <= rings; ++k) ring_start[k + 1] = ring_start[k] + ring_count[k];
  auto candidate = [&](long k, long j) {
    return k == 0 ? cplx(0.0) : std::polar(k * h, 2.0 * kPi * j / ring_count[k]);
  };

  std::vector<double> cand_rho;
  const bool radial = rf.potential().radial();
  if (radial) {
    std::vector<cplx> reps(rings + 1);
    for (long k = 0; k <= rings; ++k) reps[k] = cplx(k * h, 0.0);
    cand_rho = rf.at(reps);
  } else {
    std::vector<cplx> all(ring_start[rings + 1]);
    for (long k = 0; k <= rings; ++k)
      for (long j = 0; j < ring_count[k]; ++j) all[ring_start[k] + j] = candidate(k, j);
    cand_rho = rf.at(all);
  }

  const double reach = 0.5 * r * range.max;
  CellGrid grid(R_max + reach, reach);
  for (long k = 0; k <= rings; ++k) {
    for (long j = 0; j < ring_count[k]; ++j) {
      const cplx c = candidate(k, j);
      const double rc = radial ? cand_rho[k] : cand_rho[ring_start[k] + j];
      bool accept = true;
      grid.near(c, 0.5 * r * rc, [&](std::uint32_t i) {
        if (accept && std::abs(c - lat.points[i]) < 0.5 * r * std::min(rc, lat.rho[i])) accept = false;
      });
      if (!accept) continue;
      grid.insert(static_cast<std::uint32_t>(lat.points.size()), c);
      lat.points.push_back(c);
      lat.rho.push_back(rc);
    }
  }

  const CoverReport cover = probe_cover(lat, h * opt.probe_factor);
  lat.covering_certificate = cover.certificate();
  lat.overlap_index = cover.max_multiplicity;
  if (cover.covered < cover.probes) {
    std::ostringstream os;
    os << "lattice does not cover " << cover.probes - cover.covered << " probe point(s):";
    for (const cplx z : cover.uncovered) os << ' ' << z;
    throw ConvergenceError(os.str());
  }
  return lat;
}

CoverReport probe_cover(const Lattice& lat, double probe_spacing) {
  if (!(probe_spacing > 0.0)) throw InputError("probe spacing must be positive");
  const double R = lat.probe_radius();
  CoverReport rep;
  if (lat.points.empty()) return rep;
  const double reach = lat.r * lat.rho_max;
  CellGrid grid(lat.domain_radius + reach, reach);
  for (std::size_t i = 0; i < lat.points.size(); ++i)
    grid.insert(static_cast<std::uint32_t>(i), lat.points[i]);

  // lattice points count towards the multiplicity
  for (const cplx p : lat.points) {
    int m = 0;
    grid.near(p, reach, [&](std::uint32_t i) {
      if (std::abs(p - lat.points[i]) <= lat.r * lat.rho[i]) ++m;
    });
    rep.max_multiplicity = std::max(rep.max_multiplicity, m);
  }
  if (R <= 0.0) return rep;

  const long n = static_cast<long>(std::floor(R / probe_spacing));
  struct Row {
    std::size_t probes = 0, covered = 0;
    int mult = 0;
    std::vector<cplx> miss;
  };
  std::vector<Row> rows(static_cast<std::size_t>(2 * n + 1));
#pragma omp parallel for schedule(dynamic, 4)
  for (long y = -n; y <= n; ++y) {
    Row& row = rows[static_cast<std::size_t>(y + n)];
    for (long x = -n; x <= n; ++x) {
      const cplx p(x * probe_spacing, y * probe_spacing);
      if (std::abs(p) > R) continue;
      int m = 0;
      grid.near(p, reach, [&](std::uint32_t i) {
        if (std::abs(p - lat.points[i]) <= lat.r * lat.rho[i]) ++m;
      });
      ++row.probes;
      if (m > 0)
        ++row.covered;
      else if (row.miss.size() < 10)
        row.miss.push_back(p);
      row.mult = std::max(row.mult, m);
    }
  }
  for (const auto& row : rows) {
    rep.probes += row.probes;
    rep.covered += row.covered;
    rep.max_multiplicity = std::max(rep.max_multiplicity, row.mult);
    for (const cplx z : row.miss)
      if (rep.uncovered.size() < 10) rep.uncovered.push_back(z);
  }
  return rep;
}

int overlap_index(const Lattice& lat, double probe_spacing) {
  return probe_cover(lat, probe_spacing).max_multiplicity;
}

int exact_overlap_index(std::span<const cplx> centers, std::span<const double> radii) {
  if (centers.size() != radii.size()) throw InputError("centers and radii differ in length");
  if (centers.empty()) return 0;
  constexpr double kSlack = 1e-12;
  const double rmax = *std::max_element(radii.begin(), radii.end());
  double extent = 0.0;
  for (const cplx c : centers) extent = std::max({extent, std::abs(c.real()), std::abs(c.imag())});
  CellGrid grid(extent + 2.0 * rmax, 2.0 * rmax);
  for (std::size_t i = 0; i < centers.size(); ++i) grid.insert(static_cast<std::uint32_t>(i), centers[i]);

  auto depth = [&](cplx p) {
    int m = 0;
    grid.near(p, rmax, [&](std::uint32_t k) {
      if (std::abs(p - centers[k]) <= radii[k] * (1.0 + kSlack) + kSlack) ++m;
    });
    return m;
  };
  const auto best = kernels::parallel_map<int>(centers.size(), [&](std::size_t i) {
    int b = depth(centers[i]);
    grid.near(centers[i], 2.0 * rmax, [&](std::uint32_t j) {
      if (j <= i) return;
      const cplx d = centers[j] - centers[i];
      const double L = std::abs(d);
      const double r1 = radii[i], r2 = radii[j];
      if (L == 0.0 || L > r1 + r2 || L < std::abs(r1 - r2)) return;
      const double a = (L * L + r1 * r1 - r2 * r2) / (2.0 * L);
      const double hh = std::sqrt(std::max(0.0, r1 * r1 - a * a));
      const cplx u = d / L;
      const cplx base = centers[i] + a * u;
      const cplx perp(-u.imag(), u.real());
      b = std::max({b, depth(base + hh * perp), depth(base - hh * perp)});
    });
    return b;
  });
  return *std::max_element(best.begin(), best.end());
}

int m_r_index(std::span<const cplx> points, double R, std::span<const double> rho) {
  if (points.size() != rho.size()) throw InputError("points and rho differ in length");
  check_distinct(points);
  if (points.empty()) return 0;
  double extent = 0.0;
  for (const cplx z : points) extent = std::max({extent, std::abs(z.real()), std::abs(z.imag())});
  const double reach = R * *std::max_element(rho.begin(), rho.end());
  CellGrid grid(extent + reach, std::max(reach, 1e-3 * (extent + reach)));
  for (std::size_t i = 0; i < points.size(); ++i) grid.insert(static_cast<std::uint32_t>(i), points[i]);
  const auto counts = kernels::parallel_map<int>(points.size(), [&](std::size_t j) {
    int c = 0;
    grid.near(points[j], R * rho[j], [&](std::uint32_t k) {
      if (std::abs(points[j] - points[k]) < R * std::min(rho[j], rho[k])) ++c;
    });
    return c;
  });
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

int m_r_index(std::span<const cplx> points, double R, const RadiusField& rf) {
  const auto rho = rf.at(points);
  return m_r_index(points, R, rho);
}

std::vector<std::vector<std::size_t>> partition_separated(std::span<const cplx> points, double R,
                                                          std::span<const double> rho) {
  if (points.size() != rho.size()) throw InputError("points and rho differ in length");
  if (!(R > 0.0)) throw InputError("separation factor must be positive");
  check_distinct(points);
  std::vector<std::size_t> remaining(points.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::stable_sort(remaining.begin(), remaining.end(),
                   [&](std::size_t a, std::size_t b) { return rho[a] < rho[b]; });
  std::vector<std::vector<std::size_t>> classes;
  while (!remaining.empty()) {
    std::vector<std::size_t> taken, rest;
    for (const std::size_t i : remaining) {
      bool covered = false;
      for (const std::size_t t : taken)
        if (std::abs(points[i] - points[t]) < R * rho[t]) {
          covered = true;
          break;
        }
      (covered ? rest : taken).push_back(i);
    }
    std::sort(taken.begin(), taken.end());
    classes.push_back(std::move(taken));
    remaining = std::move(rest);
  }
  return classes;
}

std::vector<std::vector<std::size_t>> partition_separated(std::span<const cplx> points, double R,
                                                          const RadiusField& rf) {
  const auto rho = rf.at(points);
  return partition_separated(points, R, rho);
}

bool is_separated(std::span<const cplx> points, std::span<const std::size_t> cls, double R,
                  std::span<const double> rho) {
  for (std::size_t a = 0; a < cls.size(); ++a)
    for (std::size_t b = a + 1; b < cls.size(); ++b) {
      const std::size_t j = cls[a], k = cls[b];
      if (std::abs(points[j] - points[k]) < R * std::min(rho[j], rho[k])) return false;
    }
  return true;
}

}  // namespace dfock
