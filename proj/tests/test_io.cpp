#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "generators.hpp"

#include "dfock/io.hpp"

using namespace dfock;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dfock_tests";
  fs::create_directories(dir);
  return dir / name;
}

const fs::path kData = DFOCK_TEST_DATA;

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("atom CSV files") {
    const auto mu = io::read_atoms(kData / "atoms.csv");
    const auto atoms = mu.all_atoms();
    REQUIRE(atoms.size() == 5);
    CHECK(atoms[1].first == cplx(0.9, 0.4));
    CHECK(atoms[4].second == 0.7);
    const auto path = scratch("atoms_roundtrip.csv");
    io::write_atoms(path, mu);
    const auto back = io::read_atoms(path).all_atoms();
    REQUIRE(back.size() == atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      CHECK(back[i].first == atoms[i].first);
      CHECK(back[i].second == atoms[i].second);
    }
  }

  TEST_CASE("malformed CSV files") {
    const auto path = scratch("bad.csv");
    {
      std::ofstream out(path);
      out << "1,2,3\n4,5\n";
    }
    CHECK_THROWS_AS(io::read_csv(path, 3), InputError);
    {
      std::ofstream out(path);
      out << "1,2,3\n4,x,6\n";
    }
    CHECK_THROWS_AS(io::read_csv(path, 3), InputError);
    CHECK_THROWS_AS(io::read_csv(scratch("missing.csv"), 3), InputError);
  }

  TEST_CASE("radial profile files") {
    const auto p = io::read_radial_profile(kData / "gaussian_profile.csv");
    CHECK(p.phi(cplx(1.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p.laplacian(cplx(2.0, 0.0)) == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("basis files") {
    const auto p = Potential::radial_power(4.0);
    const auto b = build_basis(p, 10, basis_rule(p, 10), BasisPath::Gram);
    const auto path = scratch("basis.json");
    io::save_basis(path, b);
    const auto c = io::load_basis(path, p);
    CHECK((c.coefficients() - b.coefficients()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("lattice, field, spectrum and matrix exports") {
    const RadiusField rf(Potential::gaussian(1.0));
    const auto lat = build_lattice(rf, 0.5, 1.5);
    const auto stem = scratch("lattice");
    io::write_lattice(stem, lat);
    const auto pts = io::read_lattice_points(fs::path(stem.string() + ".csv"));
    REQUIRE(pts.size() == lat.size());
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(pts[i] - lat.points[i]) < 1e-15);
    const auto meta = io::read_json(fs::path(stem.string() + ".json"));
    CHECK(meta.at("N_r").get<int>() == lat.overlap_index);

    TransformField f;
    f.points = {0.0, cplx(1, 2)};
    f.values = {0.5, 0.25};
    io::write_field(scratch("field.csv"), f);
    CHECK(io::read_csv(scratch("field.csv"), 3).size() == 2);
    io::write_spectrum(scratch("spec.csv"), {3.0, 2.0, 1.0});
    CHECK(io::read_csv(scratch("spec.csv"), 2)[2][1] == 1.0);
    io::write_matrix(scratch("m.csv"), Eigen::MatrixXcd::Identity(3, 3));
    CHECK(io::read_csv(scratch("m.csv"), 4).size() == 9);
  }
}
