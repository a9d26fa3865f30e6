#pragma once

// CSV and JSON import/export for measures, profiles, fields, spectra,
// matrices, lattices and bases.

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "dfock/fock_basis.hpp"
#include "dfock/lattice.hpp"
#include "dfock/symbol_measure.hpp"
#include "dfock/transforms.hpp"

namespace dfock::io {

namespace fs = std::filesystem;

/// Numeric rows of a CSV file. Blank lines, lines starting with '#' and a
/// non-numeric header line are skipped. Every row must have `columns` fields.
std::vector<std::vector<double>> read_csv(const fs::path& path, std::size_t columns);

/// Atoms as rows (re, im, mass).
SymbolMeasure read_atoms(const fs::path& path);
void write_atoms(const fs::path& path, const SymbolMeasure& mu);

/// Tabulated radial potential as rows (r, phi, laplacian).
Potential read_radial_profile(const fs::path& path);

/// Rows (re, im, value).
void write_field(const fs::path& path, const TransformField& f);
/// Rows (k, lambda_k).
void write_spectrum(const fs::path& path, const std::vector<double>& spectrum);
/// Rows (m, n, re, im).
void write_matrix(const fs::path& path, const Eigen::MatrixXcd& T);

/// Points as rows (re, im) in `stem`.csv and metadata in `stem`.json.
void write_lattice(const fs::path& stem, const Lattice& lat);
std::vector<cplx> read_lattice_points(const fs::path& csv);

void save_basis(const fs::path& path, const OrthonormalBasis& b);
OrthonormalBasis load_basis(const fs::path& path, const Potential& p);

nlohmann::json read_json(const fs::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const fs::path& path, const nlohmann::json& j);

}  // namespace dfock::io
