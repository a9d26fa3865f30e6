#include <cmath>
#include <limits>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"

#include "dfock/quadrature.hpp"
#include "dfock/types.hpp"

using namespace dfock;

TEST_SUITE("quadrature") {
  TEST_CASE("plane integrals of Gaussian integrands") {
    const auto rule = PlaneRule::polar(64, 64, 8.0);
    const auto e = integrate_plane([](cplx z) { return std::exp(-std::norm(z)); }, rule);
    CHECK(std::abs(e.value - oracle::pi) / oracle::pi < 1e-8);
    CHECK(e.error < 1e-8);
    const auto m = integrate_plane([](cplx z) { return std::norm(z) * std::exp(-std::norm(z)); }, rule);
    CHECK(std::abs(m.value - oracle::pi) / oracle::pi < 1e-8);
    CHECK(integrate_plane([](cplx) { return 0.0; }, rule).value == 0.0);
  }

  TEST_CASE("a NaN at a node poisons the integral") {
    const auto rule = PlaneRule::polar(8, 8, 1.0);
    CHECK_THROWS_AS(integrate(rule, [](cplx) { return std::numeric_limits<double>::quiet_NaN(); }),
                    PoisonedIntegrand);
    CHECK_THROWS_AS(integrate(rule, [](cplx z) { return 1.0 / (std::abs(z) - std::abs(z)); }),
                    PoisonedIntegrand);
  }

  TEST_CASE("rule weights are positive and sum to the disk area") {
    for (double R : {0.5, 3.0}) {
      const auto polar = PlaneRule::polar(12, 20, R, cplx(0.3, -1.0));
      const auto cart = PlaneRule::cartesian(R / 37.0, R, cplx(-2.0, 0.5));
      for (const auto* rule : {&polar, &cart}) {
        double s = 0.0;
        for (const auto& n : rule->nodes()) {
          CHECK(n.w > 0.0);
          s += n.w;
        }
        CHECK(std::abs(s - oracle::pi * R * R) / (oracle::pi * R * R) < 1e-10);
      }
    }
  }

  TEST_CASE("disk rule nodes lie inside the disk and integrate polynomials") {
    const DiskRule d(cplx(1.0, 2.0), 0.7, 6, 12);
    for (const auto& n : d.nodes()) CHECK(std::abs(n.z - d.center()) <= d.radius());
    const double area = integrate(d, [](cplx) { return 1.0; });
    CHECK(area == doctest::Approx(oracle::pi * 0.49).epsilon(1e-13));
    // int |z - c|^2 over D(c, r) = pi r^4 / 2
    const double m2 = integrate(d, [&](cplx z) { return std::norm(z - d.center()); });
    CHECK(m2 == doctest::Approx(oracle::pi * std::pow(0.7, 4) / 2).epsilon(1e-13));
  }

  TEST_CASE("rotating a polar rule leaves radial integrals unchanged") {
    gen::Rng rng(3);
    auto f = [](cplx z) { return std::exp(-std::abs(z)) * (1.0 + std::norm(z)); };
    const auto base = PlaneRule::polar(40, 32, 6.0);
    const double ref = integrate(base, f);
    for (int k = 0; k < 10; ++k)
      CHECK(integrate(base.rotated(rng.uniform(0.0, 6.3)), f) == doctest::Approx(ref).epsilon(1e-12));
  }

  TEST_CASE("radial moments of the Gaussian weight") {
    const auto h = radial_moments([](double r) { return std::exp(-r * r); }, 40);
    REQUIRE(h.size() == 41);
    for (int n = 0; n <= 40; ++n)
      CHECK(std::abs(h[n] - oracle::gaussian_moment(n, 1.0)) / oracle::gaussian_moment(n, 1.0) < 1e-10);
    CHECK(h[3] == doctest::Approx(6.0 * oracle::pi).epsilon(1e-10));
  }

  TEST_CASE("radial moments of power weights") {
    for (double m : {1.0, 3.0, 4.0}) {
      const auto h = radial_moments([&](double r) { return std::exp(-2.0 * std::pow(r, m)); }, 25);
      for (int n = 0; n <= 25; ++n) {
        const double o = oracle::power_moment(n, m, 1.0);
        CHECK(std::abs(h[n] - o) / o < 1e-10);
      }
    }
  }

  TEST_CASE("box and disk intersection areas") {
    CHECK(box_disk_area(-0.1, 0.1, -0.1, 0.1, 1.0) == doctest::Approx(0.04).epsilon(1e-14));
    CHECK(box_disk_area(2.0, 3.0, 2.0, 3.0, 1.0) == 0.0);
    CHECK(box_disk_area(-2.0, 2.0, -2.0, 2.0, 1.0) == doctest::Approx(oracle::pi).epsilon(1e-14));
    gen::Rng rng(5);
    for (int k = 0; k < 50; ++k) {
      const double x0 = rng.uniform(-1.5, 1.0), y0 = rng.uniform(-1.5, 1.0);
      const double x1 = x0 + rng.uniform(0.01, 1.0), y1 = y0 + rng.uniform(0.01, 1.0);
      CHECK(std::abs(box_disk_area(x0, x1, y0, y1, 1.2) - oracle::box_disk_area(x0, x1, y0, y1, 1.2)) < 1e-9);
    }
  }

  TEST_CASE("lens areas") {
    CHECK(lens_area(0.0, 1.0, 3.0, 1.0) == 0.0);
    CHECK(lens_area(0.0, 2.0, 0.5, 0.5) == doctest::Approx(oracle::pi * 0.25).epsilon(1e-14));
    gen::Rng rng(6);
    for (int k = 0; k < 100; ++k) {
      const cplx a = rng.in_disk(1.0), b = rng.in_disk(1.0);
      const double ra = rng.uniform(0.1, 1.0), rb = rng.uniform(0.1, 1.0);
      CHECK(lens_area(a, ra, b, rb) == doctest::Approx(oracle::lens_area(a, ra, b, rb)).epsilon(1e-12));
    }
  }

  TEST_CASE("adaptive disk integration") {
    auto f = [](cplx z) { return std::exp(-std::norm(z)); };
    // int over D(0, r) of e^{-|z|^2} = pi (1 - e^{-r^2})
    const double v = integrate_disk_adaptive(f, 0.0, 1.3, 1e-12);
    CHECK(v == doctest::Approx(oracle::pi * (1.0 - std::exp(-1.69))).epsilon(1e-11));
  }
}
