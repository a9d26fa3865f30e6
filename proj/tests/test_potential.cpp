#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"

#include "dfock/geodesic.hpp"
#include "dfock/potential.hpp"

using namespace dfock;

TEST_SUITE("potential") {
  TEST_CASE("Gaussian radius and disk masses") {
    for (double alpha : {0.5, 1.0, 3.0}) {
      const auto p = Potential::gaussian(alpha);
      gen::Rng rng(21);
      for (int k = 0; k < 10; ++k) {
        const cplx z = rng.in_disk(4.0);
        CHECK(std::abs(radius(p, z) - oracle::gaussian_rho(alpha)) / oracle::gaussian_rho(alpha) < 1e-8);
      }
      CHECK(disk_mass(p, cplx(0.7, -0.2), 1.0) == doctest::Approx(2.0 * alpha * oracle::pi).epsilon(1e-10));
    }
    CHECK(radius(Potential::gaussian(1.0), 0.0) == doctest::Approx(0.398942280401433).epsilon(1e-9));
  }

  TEST_CASE("power weights at the origin") {
    const auto q = Potential::radial_power(4.0);
    CHECK(disk_mass(q, 0.0, 0.8) == doctest::Approx(8.0 * oracle::pi * std::pow(0.8, 4)).epsilon(1e-10));
    CHECK(radius(q, 0.0) == doctest::Approx(std::pow(8.0 * oracle::pi, -0.25)).epsilon(1e-9));
    for (double m : {2.5, 3.0, 6.0})
      for (double s : {0.5, 2.0}) {
        const auto p = Potential::radial_power(m, s);
        CHECK(disk_mass(p, 0.0, 0.6) == doctest::Approx(oracle::power_mass_at_origin(m, s, 0.6)).epsilon(1e-9));
        CHECK(radius(p, 0.0) == doctest::Approx(oracle::power_rho_at_origin(m, s)).epsilon(1e-9));
      }
    CHECK(disk_mass(q, cplx(1.0, 1.0), 1e-9) < 1e-15);
  }

  TEST_CASE("disk mass increases with the radius and equals one at rho") {
    const auto q = Potential::radial_power(4.0);
    gen::Rng rng(22);
    for (int k = 0; k < 20; ++k) {
      const cplx z = rng.in_disk(2.0);
      const double r = radius(q, z);
      CHECK(std::abs(disk_mass(q, z, r) - 1.0) < 1e-8);
      CHECK(disk_mass(q, z, 0.9 * r) < disk_mass(q, z, r));
    }
  }

  TEST_CASE("rho is 1-Lipschitz and satisfies the two-sided comparison") {
    for (const auto& p : {Potential::gaussian(1.0), Potential::radial_power(4.0), Potential::radial_power(3.0, 0.5)}) {
      gen::Rng rng(23);
      const GeometryTolerances tol;
      std::vector<cplx> a = rng.points(300, 2.5), b = rng.points(300, 2.5);
      const RadiusField rf(p);
      const auto ra = rf.at(a), rb = rf.at(b);
      for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(ra[i] - rb[i]) <= std::abs(a[i] - b[i]) + 2.0 * tol.radius_tol * std::max(ra[i], rb[i]));
      for (double r : {0.1, 0.3, 0.5})
        for (std::size_t i = 0; i < 30; ++i) {
          const cplx w = rng.in_disk(r * ra[i], a[i]);
          const double rw = rf(w);
          CHECK(rw <= (1.0 + r) * ra[i] * (1.0 + 1e-8));
          CHECK(rw >= (1.0 - r) * ra[i] * (1.0 - 1e-8));
        }
    }
  }

  TEST_CASE("radius field cache agrees with direct solves") {
    const auto q = Potential::radial_power(4.0);
    gen::Rng rng(24);
    const auto pts = rng.points(50, 2.0);
    const RadiusField rf(q, pts);
    CHECK(rf.cache_size() > 0);
    for (const cplx z : pts) CHECK(rf(z) == doctest::Approx(radius(q, z)).epsilon(1e-12));
    // rotation about the origin hits the radial cache
    CHECK(rf(pts[0] * std::polar(1.0, 1.0)) == doctest::Approx(rf(pts[0])).epsilon(1e-12));
    CHECK(rf.sigma_weight(0.0) == doctest::Approx(std::sqrt(8.0 * oracle::pi)).epsilon(1e-8));
    CHECK(RadiusField(Potential::gaussian(1.0)).sigma_weight(cplx(3, 1)) == doctest::Approx(2.0 * oracle::pi).epsilon(1e-8));
  }

  TEST_CASE("tabulated profile reproduces the Gaussian geometry") {
    std::vector<double> r, phi, lap;
    for (int i = 0; i <= 800; ++i) {
      const double t = 8.0 * i / 800.0;
      r.push_back(t);
      phi.push_back(t * t / 2.0);
      lap.push_back(2.0);
    }
    const auto p = Potential::custom_radial(r, phi, lap);
    CHECK(p.radial());
    CHECK(p.phi(cplx(1.5, 0.5)) == doctest::Approx(1.25).epsilon(1e-6));
    CHECK(radius(p, cplx(1.0, 2.0)) == doctest::Approx(oracle::gaussian_rho(1.0)).epsilon(1e-8));
    CHECK_THROWS_AS(p.phi(cplx(9.0, 0.0)), DomainError);
    CHECK_THROWS_AS(Potential::custom_radial({0, 1}, {0, 1}, {1, 1}), InputError);
    CHECK_THROWS_AS(Potential::custom_radial({0, 1, 2, 3}, {0, 1, 2, 3}, {1, -1, 1, 1}), InputError);
  }

  TEST_CASE("general weights are checked against a finite-difference Laplacian") {
    auto phi = [](cplx z) { return 0.5 * std::norm(z) + 0.25 * std::pow(z.real(), 2); };
    const auto ok = Potential::custom_general("aniso", phi, [](cplx) { return 2.5; });
    CHECK(laplacian_consistency(ok) < 1e-3);
    CHECK_FALSE(ok.radial());
    CHECK_THROWS_AS(Potential::custom_general("bad", phi, [](cplx) { return 2.0; }), InputError);
    CHECK(radius(ok, 0.0) == doctest::Approx(1.0 / std::sqrt(2.5 * oracle::pi)).epsilon(1e-9));
  }

  TEST_CASE("doubling constant") {
    const std::vector<cplx> centers = {0.0, cplx(1, 1), cplx(-2, 0.5)};
    const std::vector<double> radii = {0.1, 0.5, 1.0};
    CHECK(doubling_constant(Potential::gaussian(1.0), centers, radii) == doctest::Approx(4.0).epsilon(1e-9));
    const double d = doubling_constant(Potential::radial_power(4.0), centers, radii);
    CHECK(d >= 4.0);
    CHECK(d == doctest::Approx(16.0).epsilon(1e-8));  // attained at the origin
  }

  TEST_CASE("Christ fit") {
    gen::Rng rng(25);
    std::vector<DiskPair> pairs;
    for (int k = 0; k < 40; ++k) {
      const cplx c = rng.in_disk(1.5);
      const double R = rng.uniform(0.2, 1.0);
      pairs.push_back({c, R, rng.in_disk(R, c), R * rng.uniform(0.05, 0.9)});
    }
    const auto g = christ_fit(Potential::gaussian(1.0), pairs);
    REQUIRE(g.feasible);
    CHECK(g.C == doctest::Approx(1.0));

    const auto q = Potential::radial_power(4.0);
    const auto f = christ_fit(q, pairs);
    REQUIRE(f.feasible);
    for (const auto& pr : pairs) {
      const double big = disk_mass(q, pr.big_center, pr.big_radius);
      const double small = disk_mass(q, pr.small_center, pr.small_radius);
      const double t = pr.small_radius / pr.big_radius;
      CHECK(small <= f.C * std::pow(t, f.delta) * big * (1 + 1e-9));
      CHECK(small >= std::pow(t, 1.0 / f.delta) * big / f.C * (1 - 1e-9));
    }
    // concentric pairs at 0 have mass ratio t^4, which forces delta <= 1/4 when C = 1
    std::vector<DiskPair> conc = {{0.0, 1.0, 0.0, 0.5}, {0.0, 1.0, 0.0, 0.1}};
    const auto h = christ_fit(q, conc);
    REQUIRE(h.feasible);
    if (h.C == 1.0) CHECK(h.delta <= 0.25 + 1e-12);
  }

  TEST_CASE("geodesic grid distances") {
    const RadiusField rf(Potential::gaussian(1.0));
    const GeodesicGrid g(rf, cplx(-1, -1), cplx(1, 1));
    CHECK(g.distance(0.0, 0.0) == 0.0);
    const cplx o = g.node(g.index_of(0.0));
    const cplx x = g.node(g.index_of(cplx(0.8, 0.0)));
    const double straight = std::abs(x - o) * std::sqrt(2.0 * oracle::pi);
    CHECK(g.distance(o, x) == doctest::Approx(straight).epsilon(1e-10));
    CHECK_THROWS_AS(g.distance(0.0, cplx(3.0, 0.0)), DomainError);

    const RadiusField rq(Potential::radial_power(4.0));
    const GeodesicGrid q(rq, cplx(-1, -1), cplx(1, 1), 0.05);
    gen::Rng rng(26);
    for (int k = 0; k < 20; ++k) {
      const cplx a = q.node(q.index_of(rng.in_disk(0.9))), b = q.node(q.index_of(rng.in_disk(0.9)));
      const cplx c = q.node(q.index_of(rng.in_disk(0.9)));
      CHECK(q.distance(a, b) == doctest::Approx(q.distance(b, a)).epsilon(1e-12));
      CHECK(q.distance(a, c) <= q.distance(a, b) + q.distance(b, c) + 1e-12);
    }
  }
}
