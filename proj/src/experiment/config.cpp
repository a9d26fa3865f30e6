#include "dfock/experiment/config.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "dfock/io.hpp"

namespace dfock::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

cplx point(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("a point must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json delta_cloud() {
  return {{"kind", "atoms"},
          {"points", {{0.0, 0.0}, {0.9, 0.4}, {-0.7, 0.8}, {-0.5, -1.1}, {1.2, -0.6}}},
          {"masses", {1.0, 0.6, 0.8, 0.5, 0.7}}};
}

json dense_cloud() {
  json pts = json::array(), masses = json::array();
  for (int i = -10; i <= 10; ++i)
    for (int k = -10; k <= 10; ++k) {
      const double x = 0.1 * i, y = 0.1 * k;
      if (x * x + y * y > 1.0 + 1e-12) continue;
      pts.push_back({x, y});
      masses.push_back(0.01 * std::exp(-(x * x + y * y)));
    }
  return {{"kind", "atoms"}, {"points", pts}, {"masses", masses}};
}

void merge_defaults(json& target, const json& defaults) {
  for (auto it = defaults.begin(); it != defaults.end(); ++it) {
    if (!target.contains(it.key()))
      target[it.key()] = it.value();
    else if (it.value().is_object() && target[it.key()].is_object() && it.key() != "potential")
      merge_defaults(target[it.key()], it.value());
  }
}

void reject_unknown(const json& target, const json& defaults, const std::string& where) {
  for (auto it = target.begin(); it != target.end(); ++it) {
    if (!defaults.contains(it.key())) throw InputError("unknown config key '" + where + it.key() + "'");
    const json& d = defaults.at(it.key());
    if (d.is_object() && it.value().is_object() && it.key() != "potential")
      reject_unknown(it.value(), d, where + it.key() + ".");
  }
}

std::vector<double> doubles(const json& j, const char* key) {
  return j.at(key).get<std::vector<double>>();
}

}  // namespace

double Config::threshold(const std::string& key) const {
  const auto it = thresholds.find(key);
  if (it == thresholds.end()) throw InputError("config has no threshold '" + key + "'");
  return it->second;
}

json default_config_json() {
  json j;
  j["version"] = kConfigVersion;
  j["potential"] = {{"kind", "gaussian"}, {"alpha", 1.0}};
  j["symbols"] = json::array({
      {{"name", "delta_cloud"}, {"measure", delta_cloud()}},
      {{"name", "dense_cloud"}, {"measure", dense_cloud()}},
      {{"name", "gaussian_b1"}, {"measure", {{"kind", "gaussian_density"}, {"beta", 1.0}}}},
      {{"name", "gaussian_b2"}, {"measure", {{"kind", "gaussian_density"}, {"beta", 2.0}}}},
      {{"name", "disk_1.5"},
       {"measure", {{"kind", "indicator_disk"}, {"center", {0.0, 0.0}}, {"radius", 1.5}}}},
      {{"name", "mixed"},
       {"measure",
        {{"kind", "sum"},
         {"terms",
          {{{"kind", "scaled"}, {"c", 0.5}, {"inner", delta_cloud()}},
           {{"kind", "gaussian_density"}, {"beta", 1.0}}}}}}},
      {{"name", "delta0"}, {"role", "reference"}, {"measure", {{"kind", "dirac"}, {"point", {0.0, 0.0}}}}},
      {{"name", "area"}, {"role", "reference"}, {"measure", {{"kind", "area"}}}},
  });
  j["basis"] = {{"degree", 40}, {"radial_nodes", 0}, {"angular_nodes", 0}};
  j["grids"] = {{"z_radius", 2.5},       {"z_step", 0.5},
                {"annuli", {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0}},
                {"domain_radius", 6.0},  {"sigma_radial", 64},
                {"sigma_angular", 128},  {"geodesic_extent", 1.5}};
  j["averaging_r"] = 0.25;
  j["lattice"] = {{"r", {0.1, 0.2, 0.4}}};
  j["schatten_p"] = {0.5, 1.0, 2.0};
  j["kernel_p"] = {1.0, 2.0};
  j["scaling"] = {0.1, 1.0, 10.0};
  j["random_functions"] = 20;
  j["geometry"] = {{"pairs", 1000},
                   {"centers", 50},
                   {"comparison_r", {0.1, 0.3, 0.5}},
                   {"sigma_r", {0.1, 0.25, 0.45}}};
  j["seed"] = 1;
  j["outputs"] = {{"fields", true}, {"spectra", true}};
  j["tolerances"] = {{"ratio_window", 10.0},     {"homogeneity", 1e-9},
                     {"scaling_invariance", 1e-10}, {"trace_agreement", 1e-6},
                     {"lipschitz_slack", 2e-10}, {"comparison_slack", 1e-8},
                     {"sigma_lower", 0.5},       {"sigma_upper", 16.0},
                     {"mass_tol", 1e-8},         {"radius_tol", 1e-10},
                     {"reproducing", 1e-7},      {"quadratic_form", 1e-7},
                     {"identity", 1e-6},         {"ortho_tol", 1e-8},
                     {"far_field_cap", 1e3},     {"decay_c_cap", 1e3},
                     {"near_diag_window", 5.0},  {"vanish_tol", 1e-3},
                     {"psd_tol", 1e-9},          {"covering", 1.0},
                     {"christ_c_cap", 1e6},      {"metric_slack", 1e-9}};
  return j;
}

Potential potential_from_json(const json& j, const fs::path& base_dir) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") return Potential::gaussian(j.at("alpha").get<double>());
  if (kind == "radial_power")
    return Potential::radial_power(j.at("m").get<double>(), j.value("scale", 1.0));
  if (kind == "custom_radial") return io::read_radial_profile(base_dir / j.at("file").get<std::string>());
  throw InputError("unknown potential kind '" + kind + "'");
}

SymbolMeasure symbol_from_json(const json& j, const fs::path& base_dir) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "dirac") return SymbolMeasure::dirac(point(j.at("point")), j.value("mass", 1.0));
  if (kind == "atoms") {
    std::vector<cplx> pts;
    for (const auto& p : j.at("points")) pts.push_back(point(p));
    return SymbolMeasure::atoms(std::move(pts), j.at("masses").get<std::vector<double>>());
  }
  if (kind == "atoms_csv") return io::read_atoms(base_dir / j.at("file").get<std::string>());
  if (kind == "area") return SymbolMeasure::area();
  if (kind == "gaussian_density") return SymbolMeasure::gaussian_density(j.at("beta").get<double>());
  if (kind == "indicator_disk")
    return SymbolMeasure::indicator_disk(point(j.at("center")), j.at("radius").get<double>());
  if (kind == "power_density")
    return SymbolMeasure::power_density(j.at("k").get<double>(), j.at("support").get<double>());
  if (kind == "scaled")
    return SymbolMeasure::scaled(j.at("c").get<double>(), symbol_from_json(j.at("inner"), base_dir));
  if (kind == "sum") {
    std::vector<SymbolMeasure> terms;
    for (const auto& t : j.at("terms")) terms.push_back(symbol_from_json(t, base_dir));
    return SymbolMeasure::sum(std::move(terms));
  }
  throw InputError("unknown symbol kind '" + kind + "'");
}

Config parse_config(const json& input, const fs::path& base_dir) {
  if (!input.is_object()) throw InputError("config must be a JSON object");
  try {
    json j = input;
    reject_unknown(j, default_config_json(), "");
    merge_defaults(j, default_config_json());
    if (j.at("version").get<int>() != kConfigVersion)
      throw InputError("unsupported config version " + j.at("version").dump());

    Config c;
    c.effective = j;
    c.potential = potential_from_json(j.at("potential"), base_dir);
    for (const auto& s : j.at("symbols")) {
      const auto role = s.value("role", std::string("family"));
      if (role != "family" && role != "reference") throw InputError("unknown symbol role '" + role + "'");
      c.symbols.push_back({s.at("name").get<std::string>(), symbol_from_json(s.at("measure"), base_dir),
                           role == "reference"});
    }
    if (c.symbols.empty()) throw InputError("config lists no symbols");

    const auto& b = j.at("basis");
    c.degree = b.at("degree").get<int>();
    c.basis_radial = b.at("radial_nodes").get<int>();
    c.basis_angular = b.at("angular_nodes").get<int>();
    if (c.degree < 1) throw InputError("basis degree must be at least 1");

    const auto& g = j.at("grids");
    c.z_radius = g.at("z_radius").get<double>();
    c.z_step = g.at("z_step").get<double>();
    c.annuli = doubles(g, "annuli");
    c.domain_radius = g.at("domain_radius").get<double>();
    c.sigma_radial = g.at("sigma_radial").get<int>();
    c.sigma_angular = g.at("sigma_angular").get<int>();
    c.geodesic_extent = g.at("geodesic_extent").get<double>();
    if (!(c.z_radius >= 0.0) || !(c.z_step > 0.0)) throw InputError("z-grid needs z_radius >= 0 and z_step > 0");
    if (!(c.domain_radius > 0.0)) throw InputError("domain_radius must be positive");
    if (c.annuli.size() < 2 || !std::is_sorted(c.annuli.begin(), c.annuli.end()))
      throw InputError("annuli must be at least two increasing edges");

    c.averaging_r = j.at("averaging_r").get<double>();
    c.lattice_r = doubles(j.at("lattice"), "r");
    c.schatten_p = doubles(j, "schatten_p");
    c.kernel_p = doubles(j, "kernel_p");
    c.scaling = doubles(j, "scaling");
    if (!(c.averaging_r > 0.0)) throw InputError("averaging_r must be positive");
    for (double r : c.lattice_r)
      if (!(r > 0.0)) throw InputError("lattice r must be positive");
    for (double p : c.schatten_p)
      if (!(p > 0.0)) throw InputError("Schatten exponents must be positive");
    for (double p : c.kernel_p)
      if (!(p >= 1.0)) throw InputError("kernel exponents must be >= 1");
    for (double s : c.scaling)
      if (!(s > 0.0)) throw InputError("scaling factors must be positive");

    c.random_functions = j.at("random_functions").get<int>();
    const auto& geo = j.at("geometry");
    c.geometry_pairs = geo.at("pairs").get<int>();
    c.geometry_centers = geo.at("centers").get<int>();
    c.comparison_r = doubles(geo, "comparison_r");
    c.sigma_r = doubles(geo, "sigma_r");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.write_fields = j.at("outputs").at("fields").get<bool>();
    c.write_spectra = j.at("outputs").at("spectra").get<bool>();
    for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it)
      c.thresholds[it.key()] = it.value().get<double>();
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed config: ") + e.what());
  }
}

Config load_config(const fs::path& path) {
  return parse_config(io::read_json(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

std::string config_hash(const Config& c) { return sha256_hex(c.effective.dump()); }

}  // namespace dfock::experiment
