#include <filesystem>

#include "doctest.h"

#include "dfock/experiment/config.hpp"
#include "dfock/experiment/report.hpp"
#include "dfock/experiment/scenarios.hpp"
#include "dfock/io.hpp"

using namespace dfock;
using namespace dfock::experiment;
namespace fs = std::filesystem;

namespace {
const fs::path kData = DFOCK_TEST_DATA;
}

TEST_SUITE("config") {
  TEST_CASE("SHA-256 test vectors") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("defaults describe the six-symbol family") {
    const Config c = parse_config(nlohmann::json::object());
    int family = 0;
    for (const auto& s : c.symbols) family += s.reference ? 0 : 1;
    CHECK(family == 6);
    CHECK(c.degree == 40);
    CHECK(c.potential.gaussian_alpha().value() == 1.0);
    CHECK(c.threshold("ratio_window") == 10.0);
    CHECK_THROWS_AS(c.threshold("no_such_key"), InputError);
    CHECK(config_hash(c) == config_hash(parse_config(default_config_json())));
  }

  TEST_CASE("user values override defaults and change the hash") {
    nlohmann::json j = {{"seed", 7}, {"basis", {{"degree", 20}}}, {"tolerances", {{"ratio_window", 5.0}}}};
    const Config c = parse_config(j);
    CHECK(c.seed == 7);
    CHECK(c.degree == 20);
    CHECK(c.threshold("ratio_window") == 5.0);
    CHECK(c.threshold("homogeneity") == 1e-9);
    CHECK(config_hash(c) != config_hash(parse_config(nlohmann::json::object())));
  }

  TEST_CASE("invalid configs are rejected") {
    CHECK_THROWS_AS(parse_config(nlohmann::json::array()), InputError);
    CHECK_THROWS_AS(parse_config({{"version", 2}}), InputError);
    CHECK_THROWS_AS(parse_config({{"basis", {{"degree", 0}}}}), InputError);
    CHECK_THROWS_AS(parse_config({{"potential", {{"kind", "cubic"}}}}), InputError);
    CHECK_THROWS_AS(parse_config({{"lattice", {{"r", {0.1, -0.2}}}}}), InputError);
    CHECK_THROWS_AS(parse_config({{"thresholds", {{"ratio_window", 5.0}}}}), InputError);
    CHECK_THROWS_AS(parse_config({{"grids", {{"z_radious", 2.0}}}}), InputError);
    CHECK_THROWS_AS(load_config(kData / "empty_grid.json"), InputError);
    CHECK_THROWS_AS(load_config(kData / "missing.json"), InputError);
  }

  TEST_CASE("file references resolve against the config directory") {
    const Config c = load_config(kData / "with_files.json");
    REQUIRE(c.symbols.size() == 2);
    CHECK(c.symbols[0].measure.all_atoms().size() == 5);
    CHECK(c.potential.kind() == PotentialKind::CustomRadial);
  }

  TEST_CASE("reports reference configured thresholds and serialise non-finite values") {
    const Config c = parse_config(nlohmann::json::object());
    Report r("unit", c);
    CHECK(r.flag("small", 0.5, "ratio_window"));
    CHECK_FALSE(r.flag("big", 11.0, "ratio_window"));
    CHECK(r.flag("at_least", 1.0, "sigma_lower", Relation::AtLeast));
    CHECK_FALSE(r.flag("nan", std::numeric_limits<double>::quiet_NaN(), "ratio_window"));
    CHECK_THROWS_AS(r.flag("unknown", 1.0, "no_such_key"), InputError);
    r.scalar("inf", std::numeric_limits<double>::infinity());
    r.ratio("spread", {1.0, 2.0, 4.0});
    const auto j = r.to_json();
    CHECK(j["scalars"]["inf"] == "inf");
    CHECK(j["ratios"]["spread"]["median"] == 2.0);
    CHECK(j["ratios"]["spread"]["max_over_min"] == 4.0);
    CHECK(j["provenance"]["config_sha256"] == config_hash(c));
    CHECK(r.failures() == 2);
    CHECK_FALSE(r.passed());
  }

  TEST_CASE("reports are byte-identical across runs") {
    const Config c = parse_config({{"basis", {{"degree", 20}}}});
    const auto dir = fs::temp_directory_path() / "dfock_tests" / "determinism";
    RunOptions o;
    o.out_dir = dir / "a";
    run_scenario("trace", c, o);
    o.out_dir = dir / "b";
    run_scenario("trace", c, o);
    CHECK(io::read_json(dir / "a" / "trace.json").dump() == io::read_json(dir / "b" / "trace.json").dump());
    CHECK(run_scenario("trace", c, o).passed());
  }

  TEST_CASE("unknown scenarios are rejected") {
    const Config c = parse_config(nlohmann::json::object());
    CHECK_THROWS_AS(run_scenario("nope", c, RunOptions{}), InputError);
  }
}
