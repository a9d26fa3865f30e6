#pragma once

// Experiment configuration: one JSON document (schema version 1). Missing
// fields take the defaults below; the effective document, with defaults
// filled in, is what gets hashed into report provenance.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfock/potential.hpp"
#include "dfock/symbol_measure.hpp"

namespace dfock::experiment {

inline constexpr int kConfigVersion = 1;

struct NamedSymbol {
  std::string name;
  SymbolMeasure measure;
  /// Reference symbols (e.g. delta_0, dA) are reported but kept out of
  /// family-wide ratio statistics.
  bool reference = false;
};

struct Config {
  nlohmann::json effective;
  Potential potential = Potential::gaussian(1.0);
  std::vector<NamedSymbol> symbols;

  int degree = 40;
  int basis_radial = 0;
  int basis_angular = 0;

  double z_radius = 2.5;
  double z_step = 0.5;
  std::vector<double> annuli;
  double domain_radius = 6.0;
  int sigma_radial = 64;
  int sigma_angular = 128;
  double geodesic_extent = 1.5;

  double averaging_r = 0.25;
  std::vector<double> lattice_r;
  std::vector<double> schatten_p;
  std::vector<double> kernel_p;
  std::vector<double> scaling;

  int random_functions = 20;
  int geometry_pairs = 1000;
  int geometry_centers = 50;
  std::vector<double> comparison_r;
  std::vector<double> sigma_r;

  std::uint64_t seed = 1;
  bool write_fields = true;
  bool write_spectra = true;

  std::map<std::string, double> thresholds;

  /// Throws InputError for unknown keys.
  double threshold(const std::string& key) const;
};

/// Default document: GaussianAlpha(1), N = 40 and the six-symbol family.
nlohmann::json default_config_json();

/// Relative file references (atom CSVs, radial profiles) resolve against base_dir.
Config parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
Config load_config(const std::filesystem::path& path);

Potential potential_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
SymbolMeasure symbol_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);
/// SHA-256 of the effective document in its compact serialisation.
std::string config_hash(const Config& c);

}  // namespace dfock::experiment
