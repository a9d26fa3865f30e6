#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"

#include "dfock/symbol_measure.hpp"

using namespace dfock;

TEST_SUITE("symbol_measure") {
  TEST_CASE("disk masses of simple measures") {
    CHECK(SymbolMeasure::dirac(0.0).disk_mass(0.0, 0.3) == 1.0);
    CHECK(SymbolMeasure::area().disk_mass(cplx(5, 5), 2.0) == doctest::Approx(4.0 * oracle::pi).epsilon(1e-12));
    const auto s = SymbolMeasure::sum({SymbolMeasure::dirac(0.0), SymbolMeasure::dirac(0.0, 3.0)});
    CHECK(s.disk_mass(0.0, 1.0) == 4.0);
    // closed disks: an atom on the boundary counts
    CHECK(SymbolMeasure::dirac(cplx(1.0, 0.0)).disk_mass(0.0, 1.0) == 1.0);
    CHECK(SymbolMeasure::dirac(cplx(1.0, 0.0)).disk_mass(0.0, 0.999) == 0.0);
    for (double beta : {0.5, 2.0})
      CHECK(SymbolMeasure::gaussian_density(beta).disk_mass(0.0, 1.3) ==
            doctest::Approx(oracle::gaussian_density_mass_at_origin(beta, 1.3)).epsilon(1e-10));
  }

  TEST_CASE("clipped indicator masses match lens areas") {
    gen::Rng rng(31);
    const cplx c(0.3, -0.2);
    const auto ind = SymbolMeasure::indicator_disk(c, 1.5);
    for (int k = 0; k < 60; ++k) {
      const cplx z = rng.in_disk(3.0);
      const double r = rng.uniform(0.05, 1.5);
      CHECK(ind.disk_mass(z, r) == doctest::Approx(oracle::lens_area(z, r, c, 1.5)).epsilon(1e-9));
    }
    // tangent and nearly tangent configurations
    CHECK(ind.disk_mass(c + 2.0, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ind.disk_mass(c + 1.9, 0.4 + 1e-7) >= 0.0);
    CHECK(ind.disk_mass(c + 1.0, 0.5) == doctest::Approx(oracle::pi * 0.25).epsilon(1e-12));
  }

  TEST_CASE("power density mass") {
    // int_{D(0,r)} |z|^k dA = 2 pi r^(k+2) / (k+2)
    const auto m = SymbolMeasure::power_density(2.0, 3.0);
    CHECK(m.disk_mass(0.0, 1.2) == doctest::Approx(2.0 * oracle::pi * std::pow(1.2, 4) / 4).epsilon(1e-10));
    CHECK(m.disk_mass(0.0, 5.0) == doctest::Approx(2.0 * oracle::pi * std::pow(3.0, 4) / 4).epsilon(1e-9));
  }

  TEST_CASE("averaging transform examples") {
    const RadiusField rf(Potential::gaussian(1.0));
    gen::Rng rng(32);
    for (int k = 0; k < 5; ++k) {
      const cplx z = rng.in_disk(3.0);
      const double r = rng.uniform(0.05, 1.0);
      CHECK(averaging_transform(SymbolMeasure::area(), rf, r, z) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(averaging_transform(SymbolMeasure::scaled(2.5, SymbolMeasure::area()), rf, r, z) ==
            doctest::Approx(2.5).epsilon(1e-10));
    }
    CHECK(averaging_transform(SymbolMeasure::dirac(0.0), rf, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(averaging_transform(SymbolMeasure::dirac(0.0), rf, 0.5, cplx(1.0, 0.0)) == 0.0);
  }

  TEST_CASE("averaging monotonicity s^2 mu_s <= r^2 mu_r") {
    gen::Rng rng(33);
    const RadiusField rf(Potential::radial_power(4.0));
    const auto mu = SymbolMeasure::sum(
        {SymbolMeasure::atoms(rng.points(30, 1.5), rng.masses(30)), SymbolMeasure::gaussian_density(1.0)});
    for (int k = 0; k < 200; ++k) {
      const cplx z = rng.in_disk(1.5);
      const double r = rng.uniform(0.05, 1.0), s = r * rng.uniform(0.01, 1.0);
      const double lhs = s * s * averaging_transform(mu, rf, s, z);
      const double rhs = r * r * averaging_transform(mu, rf, r, z);
      CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
  }

  TEST_CASE("linearity of masses and transforms") {
    gen::Rng rng(34);
    const auto a = SymbolMeasure::atoms(rng.points(10, 1.0), rng.masses(10));
    const auto b = SymbolMeasure::gaussian_density(2.0);
    const auto s = SymbolMeasure::sum({a, SymbolMeasure::scaled(3.0, b)});
    const RadiusField rf(Potential::gaussian(1.0));
    for (int k = 0; k < 10; ++k) {
      const cplx z = rng.in_disk(1.5);
      const double r = rng.uniform(0.1, 0.8);
      CHECK(s.disk_mass(z, r) == doctest::Approx(a.disk_mass(z, r) + 3.0 * b.disk_mass(z, r)).epsilon(1e-12));
      CHECK(averaging_transform(s, rf, r, z) ==
            doctest::Approx(averaging_transform(a, rf, r, z) + 3.0 * averaging_transform(b, rf, r, z)).epsilon(1e-12));
    }
  }

  TEST_CASE("atoms, rotation invariance and support") {
    const auto a = SymbolMeasure::atoms({cplx(1, 0), cplx(0, 2)}, {0.5, 0.25});
    const auto s = SymbolMeasure::scaled(4.0, SymbolMeasure::sum({a, SymbolMeasure::dirac(0.0)}));
    const auto atoms = s.all_atoms();
    REQUIRE(atoms.size() == 3);
    CHECK(atoms[0].second == 2.0);
    CHECK(atoms[2].second == 4.0);
    CHECK(s.support_extent() == 2.0);
    CHECK_FALSE(a.rotation_invariant());
    CHECK(SymbolMeasure::gaussian_density(1.0).rotation_invariant());
    CHECK(SymbolMeasure::dirac(0.0).rotation_invariant());
    CHECK_THROWS_AS(SymbolMeasure::atoms({0.0}, {-1.0}), InputError);
    CHECK_THROWS_AS(SymbolMeasure::atoms({0.0, 1.0}, {1.0}), InputError);
  }

  TEST_CASE("discretisation integrates like the measure") {
    MeasureQuadrature q;
    q.unbounded = PlaneRule::polar(64, 64, 9.0);
    const auto ind = discretize(SymbolMeasure::indicator_disk(cplx(0.5, 0.5), 1.0), q);
    double area = 0.0;
    for (double w : ind.w) area += w;
    CHECK(area == doctest::Approx(oracle::pi).epsilon(1e-12));
    const auto g = discretize(SymbolMeasure::gaussian_density(1.0), q);
    double mass = 0.0;
    for (double w : g.w) mass += w;
    CHECK(mass == doctest::Approx(oracle::pi).epsilon(1e-9));
    const auto at = discretize(SymbolMeasure::scaled(2.0, SymbolMeasure::dirac(cplx(1, 1), 0.5)), q);
    REQUIRE(at.size() == 1);
    CHECK(at.w[0] == 1.0);
  }
}
