#include <cmath>
#include <functional>

#include "doctest.h"
#include "generators.hpp"

#include "dfock/lattice.hpp"

using namespace dfock;

namespace {

/// Least number of classes in any partition into R-separated classes,
/// by exhaustive colouring of the conflict graph.
std::size_t minimal_partition(const std::vector<cplx>& z, double R, const std::vector<double>& rho) {
  const std::size_t n = z.size();
  auto conflict = [&](std::size_t a, std::size_t b) {
    return std::abs(z[a] - z[b]) < R * std::min(rho[a], rho[b]);
  };
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> colour(n, 0);
    std::function<bool(std::size_t)> place = [&](std::size_t i) {
      if (i == n) return true;
      for (std::size_t c = 0; c < k; ++c) {
        bool ok = true;
        for (std::size_t j = 0; j < i && ok; ++j)
          if (colour[j] == c && conflict(i, j)) ok = false;
        if (!ok) continue;
        colour[i] = c;
        if (place(i + 1)) return true;
      }
      return false;
    };
    if (place(0)) return k;
  }
  return n;
}

/// Max multiplicity of closed disks over all pairs of probes, brute force.
int brute_multiplicity(const Lattice& lat, double spacing) {
  int best = 0;
  const double R = lat.probe_radius();
  const long n = static_cast<long>(R / spacing);
  for (long y = -n; y <= n; ++y)
    for (long x = -n; x <= n; ++x) {
      const cplx p(x * spacing, y * spacing);
      if (std::abs(p) > R) continue;
      int m = 0;
      for (std::size_t j = 0; j < lat.size(); ++j)
        if (std::abs(p - lat.points[j]) <= lat.r * lat.rho[j]) ++m;
      best = std::max(best, m);
    }
  return best;
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("greedy lattice for the Gaussian weight") {
    const RadiusField rf(Potential::gaussian(1.0));
    const auto lat = build_lattice(rf, 0.5, 3.0);
    CHECK(lat.covering_certificate == 1.0);
    CHECK(lat.overlap_index >= 1);
    const double sep = 0.25 * lat.rho_min;
    double closest = 1e300;
    for (std::size_t i = 0; i < lat.size(); ++i)
      for (std::size_t j = i + 1; j < lat.size(); ++j) closest = std::min(closest, std::abs(lat.points[i] - lat.points[j]));
    CHECK(closest >= sep * (1 - 1e-12));
    // refined probes keep full coverage
    CHECK(probe_cover(lat, lat.candidate_spacing / 10.0).certificate() == 1.0);
    const int brute = brute_multiplicity(lat, lat.candidate_spacing / 2.0);
    CHECK(overlap_index(lat, lat.candidate_spacing / 2.0) == brute);
    std::vector<double> radii;
    for (double r : lat.rho) radii.push_back(lat.r * r);
    CHECK(exact_overlap_index(lat.points, radii) >= brute);
  }

  TEST_CASE("lattice for a variable radius function") {
    const RadiusField rf(Potential::radial_power(4.0));
    const auto lat = build_lattice(rf, 0.4, 2.0);
    CHECK(lat.covering_certificate == 1.0);
    CHECK(lat.rho_max > lat.rho_min);
    double worst = 1e300;
    for (std::size_t i = 0; i < lat.size(); ++i)
      for (std::size_t j = i + 1; j < lat.size(); ++j)
        worst = std::min(worst, std::abs(lat.points[i] - lat.points[j]) / (0.2 * std::min(lat.rho[i], lat.rho[j])));
    CHECK(worst >= 1 - 1e-12);
  }

  TEST_CASE("a single disk covering the domain gives a single point") {
    const RadiusField rf(Potential::gaussian(1.0));
    const auto lat = build_lattice(rf, 10.0, 1.0);
    CHECK(lat.size() == 1);
    CHECK(lat.overlap_index == 1);
  }

  TEST_CASE("exact overlap index") {
    const std::vector<cplx> c = {0.0, 1.0, 5.0};
    CHECK(exact_overlap_index(c, std::vector<double>{0.6, 0.6, 0.6}) == 2);
    CHECK(exact_overlap_index(c, std::vector<double>{0.4, 0.4, 0.4}) == 1);
    const std::vector<cplx> same = {0.0, cplx(0.1, 0), cplx(0, 0.1)};
    CHECK(exact_overlap_index(same, std::vector<double>{1, 1, 1}) == 3);
  }

  TEST_CASE("partition examples") {
    const double rho = 0.5;
    const double R = 2.0;
    const std::vector<cplx> far = {0.0, 3.0, cplx(0, 3), cplx(3, 3)};
    const std::vector<double> rf(far.size(), rho);
    CHECK(partition_separated(far, R, rf).size() == 1);
    CHECK(m_r_index(far, R, rf) == 1);

    const std::vector<cplx> line = {0.0, R / 2 * rho, R * rho};
    const std::vector<double> rl(3, rho);
    const auto parts = partition_separated(line, R, rl);
    CHECK(parts.size() == minimal_partition(line, R, rl));
    CHECK(parts.size() == 2);

    std::vector<cplx> cluster;
    for (int k = 0; k < 5; ++k) cluster.push_back(std::polar(0.2 * R * rho, k * 1.2566));
    CHECK(m_r_index(cluster, R, std::vector<double>(5, rho)) == 5);

    const std::vector<cplx> dup = {0.0, 1.0, 0.0};
    CHECK_THROWS_AS(partition_separated(dup, R, std::vector<double>(3, rho)), InputError);
  }

  TEST_CASE("partition properties on random sets") {
    const RadiusField rf(Potential::radial_power(4.0));
    gen::Rng rng(61);
    for (int t = 0; t < 100; ++t) {
      const auto pts = rng.points(static_cast<std::size_t>(rng.integer(2, 40)), 2.0);
      const double R = rng.uniform(1.0, 3.0);
      const auto rho = rf.at(pts);
      const auto parts = partition_separated(pts, R, rho);
      std::vector<int> seen(pts.size(), 0);
      for (const auto& cls : parts) {
        CHECK(is_separated(pts, cls, R, rho));
        for (auto i : cls) ++seen[i];
      }
      for (int s : seen) CHECK(s == 1);
      CHECK(static_cast<int>(parts.size()) <= m_r_index(pts, R, rho));
      if (pts.size() <= 8) CHECK(parts.size() >= minimal_partition(pts, R, rho));
    }
  }

  TEST_CASE("counting bound on lattices") {
    for (const auto& p : {Potential::gaussian(1.0), Potential::radial_power(4.0)}) {
      const RadiusField rf(p);
      for (double r : {0.3, 0.6}) {
        const auto lat = build_lattice(rf, r, 1.5);
        for (double R : {1.5, 2.5}) {
          const double bound = 36.0 * std::pow(R, 4) / (r * r) * lat.overlap_index;
          CHECK(m_r_index(lat.points, R, lat.rho) <= bound);
        }
      }
    }
  }
}
